import logging

from celery import shared_task

from .exceptions import PolarBCError
from .runner import cell_results, trial_rows
from .schemas import ExperimentConfig

logger = logging.getLogger(__name__)


@shared_task(bind=True, max_retries=2)
def run_trial_batch(self, config_data: dict, trials: list):
    """
    워커에서 시뮬레이션 trial 묶음을 실행한다.
    코드 구성은 워커 프로세스마다 한 번만 하고 캐시를 재사용한다.
    """
    config = ExperimentConfig.model_validate(config_data)
    try:
        return [list(row) for row in trial_rows(config, trials)]
    except PolarBCError:
        raise
    except Exception as exc:
        logger.error(f"[Task] trial batch {trials[:1]}..{trials[-1:]} failed: {exc}", exc_info=True)
        raise self.retry(exc=exc, countdown=5)


@shared_task(bind=True, max_retries=2)
def evaluate_phi_cells(self, config_data: dict, phi_codes: list):
    config = ExperimentConfig.model_validate(config_data)
    try:
        return cell_results(config, phi_codes)
    except PolarBCError:
        raise
    except Exception as exc:
        logger.error(f"[Task] phi cells {phi_codes[:1]}..{phi_codes[-1:]} failed: {exc}", exc_info=True)
        raise self.retry(exc=exc, countdown=5)
