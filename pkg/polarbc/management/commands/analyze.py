from ._experiment import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Build the broadcast polar code and report its sets, schedule, rates and error bounds'
    mode = 'analyze'
