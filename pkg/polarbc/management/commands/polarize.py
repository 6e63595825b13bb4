from ._experiment import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Emit per-index Bhattacharyya profiles as CSV'
    mode = 'polarize'
