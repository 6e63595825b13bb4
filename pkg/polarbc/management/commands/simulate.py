from ._experiment import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Monte Carlo block error simulation of the chained broadcast code'
    mode = 'simulate'
