import logging

from django.core.management.base import BaseCommand, CommandError

from polarbc.exceptions import ConfigError
from polarbc.runner import EXIT_CONFIG, run
from polarbc.schemas import ExperimentConfig

logger = logging.getLogger(__name__)


class ExperimentCommand(BaseCommand):
    """Shared arguments of the four experiment subcommands; subclasses set `mode`."""

    mode = None

    def add_arguments(self, parser):
        parser.add_argument('--config', required=True, help='experiment JSON document')
        parser.add_argument('--out', default=None, help='output directory (default: config outputs or ./out)')
        parser.add_argument('--threads', type=int, default=1, help='parallel workers for trials / search cells')
        parser.add_argument('--seed-override', type=int, default=None, dest='seed_override',
                            help='replace the construction, shared and noise seeds')

    def handle(self, *args, **options):
        if options['threads'] < 1:
            raise CommandError('--threads must be at least 1', returncode=EXIT_CONFIG)
        seed = options['seed_override']
        if seed is not None and not 0 <= seed < 2 ** 64:
            raise CommandError('--seed-override must be an unsigned 64-bit integer', returncode=EXIT_CONFIG)
        try:
            config = ExperimentConfig.load(options['config']).with_overrides(mode=self.mode, seed=seed)
        except ConfigError as exc:
            raise CommandError(str(exc), returncode=EXIT_CONFIG)

        result = run(config, options['out'], options['threads'])
        if not result.ok:
            raise CommandError(result.message, returncode=result.exit_code)
        for path in result.artifacts:
            self.stdout.write(str(path))
        self.stdout.write(self.style.SUCCESS(result.message))
