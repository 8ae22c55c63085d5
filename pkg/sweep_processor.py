"""
Модуль для пакетных прогонов проверок по сетке четвёрок (n, k, a, b).
Четвёрки считаются в пуле процессов под семафором, результаты пакета
собираются в порядке параметров и дописываются единственным писателем.
"""

import asyncio
import logging
from concurrent.futures import Executor, ProcessPoolExecutor
from typing import Callable, Dict, Any, List, Optional, Tuple

from rich.progress import BarColumn, Progress, TextColumn, TimeElapsedColumn

from data_validator import DEFAULT_BUDGETS, DataValidator, SweepSpec
from errors import BudgetExceededError, InvalidParamsError, NumericalFaultError, QuadratureError
from exact_core import (
    RayParams, Regime, SequenceKind, has_no_internal_zeros, is_log_concave, is_unimodal, ray_sequence
)
from lgv_network import verify_lgv
from real_roots import pf_certificate
from resume_manager import ResumeManager, record_key
from total_positivity import is_pf_upto
import transition_analysis as ta

logger = logging.getLogger('raypf.sweep')

STATUS_PASSED = 'passed'
STATUS_FAILED = 'failed'
STATUS_ERROR = 'error'


def _kind(budgets: Dict[str, Any]) -> SequenceKind:
    return SequenceKind.DELANNOY if budgets.get('delannoy') else SequenceKind.BINOMIAL


def check_gen(params: RayParams, budgets: Dict[str, Any]) -> Dict[str, Any]:
    seq = ray_sequence(params, budgets['length'], _kind(budgets))
    return {'passed': True, 'sequence': seq.to_dict()}


def check_pf(params: RayParams, budgets: Dict[str, Any]) -> Dict[str, Any]:
    seq = ray_sequence(params, budgets['window'], _kind(budgets))
    verdict = is_pf_upto(seq, budgets['max_order'], budgets['window'], budgets['minor_cap'])
    return {'passed': verdict.passed, 'verdict': verdict.to_dict(), 'label': verdict.label}


def check_roots(params: RayParams, budgets: Dict[str, Any]) -> Dict[str, Any]:
    params.require(Regime.PF)
    seq = ray_sequence(params, params.support_bound + 1, _kind(budgets))
    certificate = pf_certificate(seq)
    values = seq.nonzero_prefix()
    certificate.update({
        'log_concave': is_log_concave(values),
        'no_internal_zeros': has_no_internal_zeros(values),
        'unimodal': is_unimodal(values),
    })
    return {'passed': certificate['pf'], 'certificate': certificate}


def check_lgv(params: RayParams, budgets: Dict[str, Any]) -> Dict[str, Any]:
    report = verify_lgv(
        params, budgets['lgv_window'], budgets['lgv_order'], bool(budgets.get('delannoy')),
        enumeration_cap=budgets['enumeration_cap'], minor_cap=budgets['minor_cap'],
    )
    return {'passed': report.passed, 'report': report.to_dict()}


def check_classify(params: RayParams, budgets: Dict[str, Any]) -> Dict[str, Any]:
    """Монотонность знаков; при u в [-1, 0] дополнительно все знаки <= 0."""
    profile = ta.classify(params, budgets['jmax'])
    result: Dict[str, Any] = {'profile': profile.to_dict()}
    passed = profile.monotone_ok
    if ta.log_convex_band_applicable(params):
        verdict = ta.log_convex_band_check(params, budgets['jmax'])
        result['log_convex_band'] = verdict.to_dict()
        passed = passed and verdict.passed
    result['passed'] = passed
    return result


def check_analytic(params: RayParams, budgets: Dict[str, Any]) -> Dict[str, Any]:
    report = ta.analytic_report(params, x_max=budgets['x_max'], t_max=budgets['t_max'], points=budgets['points'])
    return {'passed': ta.analytic_verdict(report), 'report': report}


def check_coupling(params: RayParams, budgets: Dict[str, Any]) -> Dict[str, Any]:
    """|x* - m| <= 2 - эвристика; расхождение помечается как находка, а не провал."""
    profile = ta.classify(params, budgets['jmax'])
    x_star = ta.predict_transition(params, budgets['x_max'], budgets['points'])
    within = None
    if x_star is not None and profile.m <= profile.j_max:
        within = abs(x_star - profile.m) <= 2.0
    finding = within is False
    if finding:
        logger.warning(f"Находка: {params.quadruple} x*={x_star:.6g}, m={profile.m}")
    return {'passed': True, 'm': profile.m, 'x_star': x_star, 'within_2': within, 'finding': finding}


CHECKS: Dict[str, Callable[[RayParams, Dict[str, Any]], Dict[str, Any]]] = {
    'gen': check_gen,
    'pf-check': check_pf,
    'roots': check_roots,
    'lgv': check_lgv,
    'classify': check_classify,
    'analytic': check_analytic,
    'coupling': check_coupling,
}


def run_check(check: str, quadruple: Tuple[int, int, int, int], budgets: Dict[str, Any]) -> Dict[str, Any]:
    """
    Выполняет одну проверку (в рабочем процессе). Ошибки возвращаются значением,
    чтобы один неудачный случай не обрывал весь пакет.
    """
    params = RayParams(*quadruple)
    try:
        result = CHECKS[check](params, budgets)
        result['status'] = STATUS_PASSED if result['passed'] else STATUS_FAILED
    except (NumericalFaultError, QuadratureError) as e:
        result = {'passed': False, 'status': STATUS_FAILED, 'error': str(e), 'error_type': type(e).__name__}
    except (BudgetExceededError, InvalidParamsError) as e:
        result = {'passed': False, 'status': STATUS_ERROR, 'error': str(e), 'error_type': type(e).__name__}
    return result


class SweepProcessor:
    """Класс для пакетного прогона проверок с возобновлением."""

    def __init__(self, config: Dict[str, Any] = None, budget_override: Optional[int] = None):
        self.config = config or {}
        self.logger = logging.getLogger('raypf.sweep')
        self.batch_size = self.config.get('batch_size', 32)
        self.max_workers = self.config.get('max_workers', 1)
        self.show_progress = self.config.get('show_progress', True)
        self.budget_override = budget_override
        self.validator = DataValidator(self.config.get('validation', {}))

    def effective_budgets(self, spec: SweepSpec, defaults: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """Бюджеты прогона: встроенные, затем конфиг, затем спецификация, затем RAYPF_BUDGET."""
        budgets = dict(DEFAULT_BUDGETS)
        budgets.update(defaults or {})
        budgets.update(spec.budgets)
        if self.budget_override is not None:
            budgets['minor_cap'] = self.budget_override
            budgets['enumeration_cap'] = self.budget_override
        return budgets

    async def _run_batch(
        self,
        executor: Optional[Executor],
        jobs: List[Tuple[str, RayParams]],
        budgets: Dict[str, Any]
    ) -> List[Dict[str, Any]]:
        """Выполняет пакет; порядок результатов совпадает с порядком задач."""
        if executor is None:
            return [run_check(check, params.quadruple, budgets) for check, params in jobs]

        loop = asyncio.get_running_loop()
        semaphore = asyncio.Semaphore(self.max_workers)

        async def run_with_semaphore(check: str, params: RayParams):
            async with semaphore:
                return await loop.run_in_executor(executor, run_check, check, params.quadruple, budgets)

        tasks = [run_with_semaphore(check, params) for check, params in jobs]
        return await asyncio.gather(*tasks)

    async def run(
        self,
        spec: SweepSpec,
        results_file: str,
        defaults: Optional[Dict[str, Any]] = None,
        on_batch: Optional[Callable[[int], None]] = None
    ) -> Dict[str, Any]:
        """
        Прогон спецификации. Уже записанные ключи пропускаются, каждый пакет
        дописывается сразу после вычисления.
        """
        budgets = self.effective_budgets(spec, defaults)
        valid, invalid = self.validator.expand_spec(spec)
        stats = self.validator.get_validation_stats(len(valid) + len(invalid), valid, invalid)

        resume = ResumeManager(results_file)
        await resume.load_recorded_keys()
        pending: List[Tuple[str, RayParams]] = []
        skipped = 0
        for params in valid:
            for check in spec.checks:
                if await resume.is_recorded(record_key(check, params, budgets)):
                    skipped += 1
                else:
                    pending.append((check, params))
        self.logger.info(f"Задач к выполнению: {len(pending)}, пропущено как записанные: {skipped}")

        resume_info = await resume.get_resume_info()
        self.logger.info(f"Файл результатов {resume_info['results_file']}: записей {resume_info['recorded']}, провалено {resume_info['failed']}")
        summary = {
            'validation': stats,
            'resume': resume_info,
            'jobs': len(pending) + skipped,
            'skipped': skipped,
            'computed': 0,
            STATUS_PASSED: 0,
            STATUS_FAILED: 0,
            STATUS_ERROR: 0,
            'failures': [],
        }

        executor = ProcessPoolExecutor(max_workers=self.max_workers) if self.max_workers > 1 else None
        try:
            with Progress(
                TextColumn("[bold blue]{task.description}"),
                BarColumn(),
                TextColumn("{task.completed}/{task.total}"),
                TimeElapsedColumn(),
                disable=not self.show_progress,
            ) as progress:
                task = progress.add_task("Прогон", total=len(pending))
                for start in range(0, len(pending), self.batch_size):
                    batch = pending[start:start + self.batch_size]
                    results = await self._run_batch(executor, batch, budgets)
                    records = []
                    for (check, params), result in zip(batch, results):
                        summary[result['status']] += 1
                        if result['status'] != STATUS_PASSED:
                            summary['failures'].append({
                                'check': check, 'quadruple': list(params.quadruple),
                                'status': result['status'], 'error': result.get('error'),
                            })
                        records.append({'key': record_key(check, params, budgets), 'result': result})
                    await resume.append_batch(records)
                    summary['computed'] += len(batch)
                    progress.update(task, advance=len(batch))
                    if on_batch is not None:
                        on_batch(summary['computed'])
        finally:
            if executor is not None:
                executor.shutdown()

        self.logger.info(
            f"Прогон завершён: пройдено {summary[STATUS_PASSED]}, провалено {summary[STATUS_FAILED]}, "
            f"ошибок {summary[STATUS_ERROR]}, пропущено {skipped}"
        )
        return summary
