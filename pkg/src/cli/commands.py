"""
하위 명령 구현

모든 cmd_* 는 (RunContext, argparse.Namespace) 를 받아 ResultDocument 를 반환한다.
"""

import argparse
import logging
import math
import os
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional

from src.angular import Basis, PhaseConvention, TimeReversal
from src.cli.suites import run_suites
from src.config import Config
from src.document import EnsembleDocument, ResultDocument, StateDocument
from src.errors import UsageError
from src.monotones import (
    BINOMIAL_MAX_COPIES,
    BRUTE_FORCE_MAX_COPIES,
    COUPLED_MAX_COPIES,
    Monotones,
    MonotoneValue,
)
from src.protocols import ConversionPlan, Protocols, TargetEnsemble
from src.standardform import StandardForm
from src.trio import Trio
from src.validator import Validator

logger = logging.getLogger(__name__)


@dataclass
class RunContext:
    """
    한 번의 실행 설정 (CLI 인자가 설정 파일 값을 덮어씀)

    Attributes:
        convention: 명시된 위상 규약 (없으면 None, 문서 값을 따름)
        default_convention: 설정 파일의 위상 규약
        seed: 난수 시드
        trials: 시행 수
        tolerance: 검사 허용치
        input: 입력 경로 ('-' 는 표준 입력)
        output: 출력 경로 ('-' 는 표준 출력)
    """
    convention: Optional[PhaseConvention]
    default_convention: PhaseConvention
    seed: int
    trials: int
    tolerance: float
    input: str
    output: str

    @staticmethod
    def from_args(args: argparse.Namespace, config: Config) -> "RunContext":
        trials = args.trials if args.trials is not None else config.get_trials()
        Validator.check_copy_count("trials", trials, 1, 10 ** 7)
        return RunContext(
            convention=PhaseConvention.parse(args.convention) if args.convention else None,
            default_convention=PhaseConvention.parse(config.get_convention()),
            seed=args.seed if args.seed is not None else config.get_seed(),
            trials=trials,
            tolerance=Validator.check_tolerance(args.tol if args.tol is not None else config.get_tolerance()),
            input=args.input,
            output=args.output
        )

    def resolve_convention(self, document: StateDocument) -> PhaseConvention:
        """--convention 이 있으면 우선, 없으면 문서의 규약"""
        if self.convention is not None:
            return self.convention
        if document.convention:
            return document.parse_convention()
        return self.default_convention


def _load_state(context: RunContext):
    document, psi = StateDocument.read(context.input)
    conv = context.resolve_convention(document)
    sc = TimeReversal.to_self_conjugate(psi, conv) if psi.basis is Basis.ANGULAR else psi
    sc.check_normalized(context.tolerance)
    inputs = {"state": document.to_dict(), "convention": conv.value, "tolerance": context.tolerance}
    return psi, sc, conv, inputs


def _monotone_outputs(value: MonotoneValue) -> Dict[str, Any]:
    return {"tau": value.tau, "tau_inf": value.tau_inf}


def cmd_standardize(context: RunContext, args: argparse.Namespace) -> ResultDocument:
    """
    상태 문서를 표준 자원 형식으로 환원

    출력: θ, τ, τ∞, 실직교 변환, 전역 위상, 표준 형식 진폭
    """
    _, sc, _, inputs = _load_state(context)
    result = StandardForm.standardize(sc, context.tolerance)
    outputs = {
        "theta": result.theta,
        "global_phase": result.global_phase,
        "rotation_angle": result.rotation_angle,
        "reflected": result.reflected,
        "transform": result.transform,
        "labels": StateDocument.from_state(sc).labels,
        "standard_amplitudes": result.standard_amplitudes(sc),
    }
    outputs.update(_monotone_outputs(MonotoneValue.from_theta(result.theta)))
    return ResultDocument("standardize", inputs, outputs)


def cmd_tau(context: RunContext, args: argparse.Namespace) -> ResultDocument:
    """τ, τ∞, |⟨ψ*|ψ⟩| 와 TR 불변 여부"""
    _, sc, _, inputs = _load_state(context)
    overlap = Monotones.overlap(sc, tolerance=context.tolerance)
    outputs = {
        "overlap": overlap,
        "is_invariant": TimeReversal.is_invariant(sc, tolerance=context.tolerance),
    }
    outputs.update(_monotone_outputs(MonotoneValue.from_cos(overlap)))
    return ResultDocument("tau", inputs, outputs)


def cmd_average(context: RunContext, args: argparse.Namespace) -> ResultDocument:
    """TR 그룹 평균 (ρ + θ̂ρθ̂†)/2 과 순도"""
    _, sc, _, inputs = _load_state(context)
    rho = Trio.group_average_state(sc.normalized())
    outputs = {
        "labels": StateDocument.from_state(sc).labels,
        "density": rho.mat,
        "purity": rho.purity,
    }
    return ResultDocument("average", inputs, outputs)


def _encode_plan(plan: ConversionPlan) -> Dict[str, Any]:
    stages = []
    for stage in plan.stages:
        stages.append({
            "description": stage.description,
            "kraus": [k.mat for k in stage.instrument.kraus],
            "corrections": stage.corrections,
        })
    outcomes = [
        {"path": o.key, "probability": o.probability, "theta": o.resource.theta, "tau": o.resource.tau}
        for o in plan.outcomes
    ]
    return {"parameters": plan.parameters, "stages": stages, "expected_outcomes": outcomes}


def cmd_convert(context: RunContext, args: argparse.Namespace) -> ResultDocument:
    """
    변환 측정 합성 (det / ens / pmax)

    출력: Kraus 행렬, A 또는 a_k/b_k, γ̄, 정확한 분기 확률과 시드 기반 표본 통계

    Raises:
        UsageError: 모드에 필요한 인자 누락
        MonotoneViolation: 변환 불가능
    """
    mode = args.mode
    inputs: Dict[str, Any] = {"mode": mode, "theta": args.theta, "trials": context.trials}
    gamma: Optional[float] = None

    if mode in ("det", "pmax"):
        if args.gamma is None:
            raise UsageError(f"convert {mode}: --gamma 가 필요합니다")
        gamma = args.gamma
        inputs["gamma"] = gamma
    elif args.ensemble is None:
        raise UsageError("convert ens: --ensemble 파일이 필요합니다")

    outputs: Dict[str, Any] = {}
    if mode == "det":
        plan = Protocols.deterministic_convert(args.theta, gamma)
    elif mode == "ens":
        pairs = EnsembleDocument.read(args.ensemble)
        inputs["ensemble"] = [list(p) for p in pairs]
        plan = Protocols.ensemble_convert(args.theta, TargetEnsemble.from_pairs(pairs))
    else:
        probability, plan = Protocols.max_probability(args.theta, gamma)
        outputs["probability"] = probability
        outputs["success_probability"] = plan.success_probability(gamma)

    outputs.update(_encode_plan(plan))
    branches = plan.execute()
    outputs["branches"] = [
        {
            "path": b.key,
            "probability": b.probability,
            "tau": None if b.state is None else Monotones.tau(b.state),
        }
        for b in branches
    ]
    outputs["tau_before"] = 1.0 - math.cos(plan.theta)
    outputs["average_tau_after"] = plan.average_tau()
    outputs["sampled_counts"] = plan.sample(seed=context.seed, trials=context.trials)
    return ResultDocument(f"convert {mode}", inputs, outputs, seed=context.seed)


def cmd_rate(context: RunContext, args: argparse.Namespace) -> ResultDocument:
    """점근 비율 τ∞(ψ)/τ∞(φ)"""
    rate = Protocols.asymptotic_rate(args.theta_psi, args.theta_phi)
    outputs = {
        "rate": rate,
        "tau_inf_psi": MonotoneValue.from_theta(args.theta_psi).tau_inf,
        "tau_inf_phi": MonotoneValue.from_theta(args.theta_phi).tau_inf,
    }
    inputs = {"theta_psi": args.theta_psi, "theta_phi": args.theta_phi}
    return ResultDocument("rate", inputs, outputs)


def cmd_copies(context: RunContext, args: argparse.Namespace) -> ResultDocument:
    """n 사본에서 얻는 최대 목표 사본 수"""
    m = Protocols.max_copies(args.n, args.theta_psi, args.theta_phi)
    outputs = {
        "max_copies": m,
        "rate": Protocols.asymptotic_rate(args.theta_psi, args.theta_phi),
    }
    inputs = {"n": args.n, "theta_psi": args.theta_psi, "theta_phi": args.theta_phi}
    return ResultDocument("copies", inputs, outputs)


def cmd_power(context: RunContext, args: argparse.Namespace) -> ResultDocument:
    """
    |ψ_θ⟩^{⊗n} 의 표준 각

    공식 값과 함께, 크기가 허용되면 곱 기저/결합 기저 오라클 값을 보고한다.
    """
    theta_n = Monotones.tensor_power_angle(args.theta, args.n)
    outputs: Dict[str, Any] = {"theta_n": theta_n}
    outputs.update(_monotone_outputs(MonotoneValue.from_theta(theta_n)))
    outputs["brute_force_theta_n"] = (
        Monotones.brute_force_power_standardize(args.theta, args.n) if args.n <= BRUTE_FORCE_MAX_COPIES else None
    )
    outputs["coupled_theta_n"] = (
        Monotones.coupled_power_standardize(args.theta, args.n) if args.n <= COUPLED_MAX_COPIES else None
    )
    if args.n <= BINOMIAL_MAX_COPIES:
        expansion = Monotones.binomial_expansion(args.theta, args.n)
        outputs["binomial_coefficients"] = expansion.coeffs
        outputs["binomial_total"] = expansion.total
    inputs = {"theta": args.theta, "n": args.n}
    return ResultDocument("power", inputs, outputs)


def cmd_verify(context: RunContext, args: argparse.Namespace) -> ResultDocument:
    """
    속성 검증 스위트 실행

    Raises:
        UsageError: 알 수 없는 스위트
    """
    result = run_suites(args.suite, context.seed, context.trials, context.tolerance)
    if args.report:
        report_path = args.report
        # 디렉토리를 주면 verify_<스위트>_seed<시드>.log
        if os.path.isdir(report_path):
            report_path = Validator.report_log_path(report_path, args.suite, context.seed)
        result.save_to_log_file(report_path)
        logger.info("검증 리포트 저장: %s", report_path)
    if not result.success:
        logger.warning("%s", result.format_report())
    outputs = {
        "success": result.success,
        "checks": [
            {
                "suite": c.suite,
                "name": c.name,
                "passed": c.passed,
                "failed": c.failed,
                "max_defect": c.max_defect,
                "notes": c.notes,
            }
            for c in result.checks
        ],
    }
    if args.suite in ("monotone", "all"):
        # 판정하지 않고 결과 문서에만 남긴다
        best, witness = Monotones.search_tau_inf_ensemble_violation(trials=context.trials, seed=context.seed)
        outputs["tau_inf_search"] = {
            "seed": context.seed,
            "trials": context.trials,
            "max_excess": best,
            "witness": witness,
        }
    inputs = {"suite": args.suite, "trials": context.trials, "tolerance": context.tolerance}
    return ResultDocument("verify", inputs, outputs, seed=context.seed)


COMMANDS: Dict[str, Callable[[RunContext, argparse.Namespace], ResultDocument]] = {
    "standardize": cmd_standardize,
    "tau": cmd_tau,
    "average": cmd_average,
    "convert": cmd_convert,
    "rate": cmd_rate,
    "copies": cmd_copies,
    "power": cmd_power,
    "verify": cmd_verify,
}
