from ._experiment import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Evaluate the rate region of the configured auxiliaries and/or search for the best ones'
    mode = 'region'
