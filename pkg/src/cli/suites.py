"""
verify 명령의 속성 검증 스위트

각 스위트는 (rng, trials, tolerance) 를 받아 PropertyCheck 목록을 반환한다.
스위트마다 같은 시드로 새 난수 생성기를 만들므로 단독 실행과 all 실행의 결과가 같다.
"""

import logging
import math
from typing import Callable, Dict, List

import numpy as np

from src.angular import (
    AngularCoupling,
    AngularLabel,
    Basis,
    ClebschGordan,
    PhaseConvention,
    ProductLabel,
    PureState,
    TimeReversal,
)
from src.errors import MonotoneViolation, PropertyCheck, UsageError, VerificationResult
from src.monotones import Monotones
from src.protocols import Protocols, TargetEnsemble
from src.standardform import StandardForm, StandardResource
from src.trio import KrausOperator, Trio

logger = logging.getLogger(__name__)

# 항등식 허용치
EXACT = 1e-12
# 생성 측정/분기 허용치
PROTOCOL = 1e-10
# 표준 형식 재구성 허용치
RECONSTRUCTION = 1e-9
# 결합 기저 검사의 최대 ℓ
MAX_ELL = 4


def _random_angular_state(rng: np.random.Generator, max_ell: int) -> PureState:
    ell = int(rng.integers(0, max_ell + 1))
    labels = [AngularLabel(1, ell, m) for m in range(-ell, ell + 1)]
    amp = rng.normal(size=len(labels)) + 1j * rng.normal(size=len(labels))
    return PureState.from_labels(labels, amp / np.linalg.norm(amp))


def _random_product_state(rng: np.random.Generator, max_ell: int) -> PureState:
    left = _random_angular_state(rng, max_ell)
    right = _random_angular_state(rng, max_ell)
    return AngularCoupling.tensor(left, right)


def basis_suite(rng: np.random.Generator, trials: int, tolerance: float) -> List[PropertyCheck]:
    """자기켤레 기저, CG 부호 항등식, 곱 상태 TR"""
    fixed = PropertyCheck("basis", "self_conjugate_fixed_points")
    unitary_check = PropertyCheck("basis", "self_conjugate_unitary")
    for conv in PhaseConvention:
        for ell in range(MAX_ELL + 1):
            rows = [AngularLabel(1, ell, m) for m in range(-ell, ell + 1)]
            unitary, columns = TimeReversal.self_conjugate_transform(rows, conv)
            defect = float(np.max(np.abs(unitary.conj().T @ unitary - np.eye(len(columns)))))
            unitary_check.record(defect <= EXACT, defect, f"{conv.value} ℓ={ell}")
            for j, column in enumerate(columns):
                vec = PureState(Basis.ANGULAR, tuple(rows), unitary[:, j])
                defect = vec.distance(TimeReversal.apply_time_reversal(vec, conv))
                fixed.record(defect <= EXACT, defect, f"{conv.value} {column}")

    identity = PropertyCheck("basis", "clebsch_gordan_sign_identity")
    orthogonal = PropertyCheck("basis", "coupling_matrix_orthogonal")
    for l1 in range(MAX_ELL + 1):
        for l2 in range(MAX_ELL + 1):
            matrix, pairs, coupled = ClebschGordan.coupling_matrix(l1, l2)
            defect = float(np.max(np.abs(matrix.T @ matrix - np.eye(len(coupled)))))
            orthogonal.record(defect <= EXACT, defect, f"ℓ={l1}, ℓ′={l2}")
            for m1, m2 in pairs:
                for L, M in coupled:
                    if M != m1 + m2:
                        continue
                    left = ClebschGordan.clebsch_gordan(l1, m1, l2, m2, L, M)
                    right = (-1) ** (l1 + l2 - L) * ClebschGordan.clebsch_gordan(l1, -m1, l2, -m2, L, -M)
                    defect = abs(left - right)
                    identity.record(defect <= EXACT, defect, f"({l1}{m1};{l2}{m2}|{L}{M})")

    factorization = PropertyCheck("basis", "ll_product_factorization")
    round_trip = PropertyCheck("basis", "self_conjugate_round_trip")
    product_basis = PropertyCheck("basis", "product_self_conjugate_conjugation")
    for _ in range(trials):
        psi = _random_product_state(rng, 3)
        coupled_tr = TimeReversal.apply_time_reversal(psi, PhaseConvention.LANDAU_LIFSHITZ)
        factorwise = TimeReversal.apply_factorwise(psi, PhaseConvention.LANDAU_LIFSHITZ)
        defect = coupled_tr.distance(factorwise)
        factorization.record(defect <= EXACT, defect)

        for conv in PhaseConvention:
            via_angular = TimeReversal.to_self_conjugate(TimeReversal.apply_time_reversal(psi, conv), conv)
            via_conjugate = TimeReversal.apply_self_conjugate(TimeReversal.to_self_conjugate(psi, conv))
            defect = via_angular.distance(via_conjugate)
            product_basis.record(defect <= EXACT, defect, conv.value)

        single = _random_angular_state(rng, MAX_ELL)
        for conv in PhaseConvention:
            back = TimeReversal.to_angular(TimeReversal.to_self_conjugate(single, conv), conv)
            defect = single.distance(back)
            round_trip.record(defect <= EXACT, defect, conv.value)

    sakurai = PropertyCheck("basis", "sakurai_product_sign_mismatch")
    witness = PureState.basis_state(ProductLabel((AngularLabel(1, 1, 0), AngularLabel(1, 1, 1))))
    conv = PhaseConvention.SAKURAI
    overlap = TimeReversal.apply_time_reversal(witness, conv).fidelity(TimeReversal.apply_factorwise(witness, conv))
    sakurai.record(overlap < 1.0 - 1e-6, 1.0 - overlap, f"|⟨결합 TR|인자별 TR⟩| = {overlap:.6g}")

    return [fixed, unitary_check, identity, orthogonal, factorization, round_trip, product_basis, sakurai]


def trio_suite(rng: np.random.Generator, trials: int, tolerance: float) -> List[PropertyCheck]:
    """실수 Kraus 판정과 공변성, 무작위 TRIO 생성"""
    real_ok = PropertyCheck("trio", "real_kraus_is_covariant")
    complex_fails = PropertyCheck("trio", "complex_kraus_not_covariant")
    instruments = PropertyCheck("trio", "random_instrument_complete")
    orthogonal = PropertyCheck("trio", "random_orthogonal")
    average = PropertyCheck("trio", "group_average_purity")

    for _ in range(trials):
        dim = int(rng.integers(2, 9))
        phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
        real = KrausOperator(phase * rng.normal(size=(dim, dim)))
        defect = Trio.covariance_defect(real, trials=10, seed=rng)
        real_ok.record(defect <= tolerance and Trio.is_trio(real, tolerance), defect)

        imaginary = KrausOperator(rng.normal(size=(dim, dim)) + 1e-2j * rng.normal(size=(dim, dim)))
        defect = Trio.covariance_defect(imaginary, trials=10, seed=rng)
        complex_fails.record(defect > tolerance and not Trio.is_trio(imaginary, tolerance), defect)

        inst = Trio.random_trio_instrument(dim, int(rng.integers(1, 5)), rng)
        report = Trio.validate_instrument(inst, PROTOCOL)
        instruments.record(report.complete and report.trio, report.defect)

        o = Trio.random_trio_orthogonal(dim, rng).mat
        defect = float(np.max(np.abs(o.conj().T @ o - np.eye(dim))))
        orthogonal.record(defect <= EXACT and Trio.is_trio(KrausOperator(o), EXACT), defect)

        theta = rng.uniform(0, np.pi / 2)
        rho = Trio.group_average_state(StandardForm.standard_state(StandardResource(theta), 2))
        defect = abs(rho.purity - (1.0 + math.cos(theta) ** 2) / 2.0)
        average.record(defect <= EXACT, defect)

    return [real_ok, complex_fails, instruments, orthogonal, average]


def standard_form_suite(rng: np.random.Generator, trials: int, tolerance: float) -> List[PropertyCheck]:
    """표준 형식 환원 (직교성, 두 칸 재구성, cos θ 항등식, 직교 불변성)"""
    orthogonal = PropertyCheck("basis", "standardize_orthogonal")
    reconstruction = PropertyCheck("basis", "standardize_two_slot_form")
    cos_identity = PropertyCheck("basis", "standardize_cos_identity")
    invariance = PropertyCheck("basis", "standardize_orthogonal_invariance")

    for _ in range(trials):
        dim = int(rng.integers(2, 17))
        psi = Trio.random_state(dim, rng)
        result = StandardForm.standardize(psi)
        k = result.transform
        defect = float(np.max(np.abs(k.T @ k - np.eye(dim))))
        orthogonal.record(defect <= PROTOCOL, defect)

        target = np.zeros(dim, dtype=complex)
        target[0] = 1.0 / np.sqrt(2.0)
        target[1] = np.exp(1j * result.theta) / np.sqrt(2.0)
        defect = float(np.max(np.abs(result.standard_amplitudes(psi) - target)))
        reconstruction.record(defect <= RECONSTRUCTION, defect)

        defect = abs(math.cos(result.theta) - abs(np.sum(psi.amp * psi.amp)))
        cos_identity.record(defect <= PROTOCOL, defect)

        o = Trio.random_trio_orthogonal(dim, rng).mat
        rotated = StandardForm.standardize(psi.with_amplitudes(o @ psi.amp))
        defect = abs(rotated.theta - result.theta)
        invariance.record(defect <= RECONSTRUCTION, defect)

    return [orthogonal, reconstruction, cos_identity, invariance]


def monotone_suite(rng: np.random.Generator, trials: int, tolerance: float) -> List[PropertyCheck]:
    """τ 앙상블 단조성, 직교 불변성, τ∞ 가법성"""
    ensemble = PropertyCheck("monotone", "tau_ensemble_monotone")
    invariance = PropertyCheck("monotone", "tau_orthogonal_invariance")
    additivity = PropertyCheck("monotone", "tau_inf_additive")
    standard = PropertyCheck("monotone", "tau_standard_state")
    deterministic = PropertyCheck("monotone", "tau_inf_deterministic_monotone")

    for _ in range(trials):
        dim = int(rng.integers(2, 9))
        psi = Trio.random_state(dim, rng)
        before = Monotones.tau(psi)
        inst = Trio.random_trio_instrument(dim, int(rng.integers(2, 5)), rng)
        after = math.fsum(p * Monotones.tau(phi) for p, phi in Trio.apply_instrument(inst, psi) if phi is not None)
        ensemble.record(after <= before + tolerance, max(0.0, after - before))

        o = Trio.random_trio_orthogonal(dim, rng).mat
        defect = abs(Monotones.tau(psi.with_amplitudes(o @ psi.amp)) - before)
        invariance.record(defect <= PROTOCOL, defect)

        other = Trio.random_state(int(rng.integers(2, 5)), rng)
        product = AngularCoupling.tensor(psi, other)
        defect = abs(Monotones.tau_infinity(product) - Monotones.tau_infinity(psi) - Monotones.tau_infinity(other))
        additivity.record(defect <= PROTOCOL, defect)

        theta = rng.uniform(0, np.pi / 2)
        defect = abs(Monotones.tau(StandardForm.standard_state(StandardResource(theta))) - (1.0 - math.cos(theta)))
        standard.record(defect <= EXACT, defect)

        gamma = rng.uniform(0, theta)
        plan = Protocols.deterministic_convert(theta, gamma)
        limit = Monotones.tau_infinity(StandardForm.standard_state(StandardResource(theta)))
        worst = max(Monotones.tau_infinity(b.state) for b in plan.execute() if b.state is not None)
        deterministic.record(worst <= limit + tolerance, max(0.0, worst - limit))

    return [ensemble, invariance, additivity, standard, deterministic]


def _random_feasible_ensemble(rng: np.random.Generator):
    count = int(rng.integers(2, 5))
    probabilities = rng.dirichlet(np.ones(count))
    probabilities[-1] = max(0.0, 1.0 - math.fsum(probabilities[:-1]))
    gammas = rng.uniform(0, np.pi / 2, size=count)
    target = TargetEnsemble.from_pairs(list(zip(probabilities.tolist(), gammas.tolist())))
    low = math.acos(min(max(target.average_cos, 0.0), 1.0))
    return rng.uniform(low, np.pi / 2), target


def protocols_suite(rng: np.random.Generator, trials: int, tolerance: float) -> List[PropertyCheck]:
    """결정적/앙상블/최대 확률 변환의 측정과 분기"""
    det_complete = PropertyCheck("protocols", "deterministic_instrument_valid")
    det_branches = PropertyCheck("protocols", "deterministic_branch_tau")
    det_corrected = PropertyCheck("protocols", "deterministic_branch_correction")
    necessity = PropertyCheck("protocols", "deterministic_necessity")
    ens_kraus = PropertyCheck("protocols", "ensemble_kraus_identity")
    ens_complete = PropertyCheck("protocols", "ensemble_instrument_valid")
    pmax = PropertyCheck("protocols", "max_probability_success")
    soundness = PropertyCheck("protocols", "plan_average_tau_monotone")

    for _ in range(trials):
        theta = rng.uniform(0, np.pi / 2)
        gamma = rng.uniform(0, theta)
        plan = Protocols.deterministic_convert(theta, gamma)
        report = Trio.validate_instrument(plan.stages[0].instrument, PROTOCOL)
        det_complete.record(report.complete and report.trio, report.defect)
        target = StandardForm.standard_state(StandardResource(gamma))
        for branch in plan.execute():
            defect = abs(Monotones.tau(branch.state) - (1.0 - math.cos(gamma)))
            det_branches.record(defect <= PROTOCOL, defect, f"θ={theta:.6g}, γ={gamma:.6g}")
            defect = 1.0 - branch.state.fidelity(target)
            det_corrected.record(defect <= RECONSTRUCTION, defect)

        low = rng.uniform(0, np.pi / 2 - 0.01)
        high = rng.uniform(low + 1e-3, np.pi / 2)
        try:
            Protocols.deterministic_convert(low, high)
            raised = False
        except MonotoneViolation:
            raised = True
        necessity.record(raised, note=f"θ={low:.6g}, γ={high:.6g}")

        theta, ensemble = _random_feasible_ensemble(rng)
        plan = Protocols.ensemble_convert(theta, ensemble)
        gamma_bar = plan.parameters["gamma_bar"]
        phi_bar = StandardForm.standard_state(StandardResource(gamma_bar)).amp
        stage = plan.stages[1]
        report = Trio.validate_instrument(stage.instrument, PROTOCOL)
        ens_complete.record(report.complete and report.trio, report.defect)
        for kraus, (p, res) in zip(stage.instrument.kraus, ensemble.items):
            expected = math.sqrt(p) * StandardForm.standard_state(res).amp
            defect = float(np.max(np.abs(kraus.apply(phi_bar) - expected)))
            ens_kraus.record(defect <= PROTOCOL, defect)
        after = plan.average_tau()
        before = 1.0 - math.cos(theta)
        soundness.record(after <= before + tolerance, max(0.0, after - before))

        theta = rng.uniform(0, np.pi / 2)
        gamma = rng.uniform(0, np.pi / 2)
        p, plan = Protocols.max_probability(theta, gamma)
        expected = 1.0 if gamma == 0 else min((1.0 - math.cos(theta)) / (1.0 - math.cos(gamma)), 1.0)
        defect = abs(plan.success_probability(gamma) - expected) + abs(p - expected)
        pmax.record(defect <= PROTOCOL, defect, f"θ={theta:.6g}, γ={gamma:.6g}")

    return [det_complete, det_branches, det_corrected, necessity, ens_kraus, ens_complete, pmax, soundness]


def asymptotic_suite(rng: np.random.Generator, trials: int, tolerance: float) -> List[PropertyCheck]:
    """텐서 거듭제곱 오라클, 이항 전개, 최대 사본 수"""
    brute = PropertyCheck("asymptotic", "tensor_power_brute_force")
    coupled = PropertyCheck("asymptotic", "tensor_power_coupled_basis")
    binomial = PropertyCheck("asymptotic", "binomial_expansion")
    nielsen = PropertyCheck("asymptotic", "max_copies_matches_feasibility")
    example = PropertyCheck("asymptotic", "max_copies_example")
    limit = PropertyCheck("asymptotic", "copy_ratio_converges")

    for theta in (0.2, 0.7, 1.2):
        for n in range(1, 7):
            formula = Monotones.tensor_power_angle(theta, n)
            defect = abs(Monotones.brute_force_power_standardize(theta, n) - formula)
            brute.record(defect <= RECONSTRUCTION, defect, f"θ={theta}, n={n}")
            defect = abs(Monotones.coupled_power_standardize(theta, n) - formula)
            coupled.record(defect <= RECONSTRUCTION, defect, f"θ={theta}, n={n}")

            expansion = Monotones.binomial_expansion(theta, n)
            defect = abs(expansion.total - math.cos(theta) ** n)
            defect = max(defect, abs(float(np.sum(np.abs(expansion.coeffs))) - 1.0))
            defect = max(defect, float(np.max(np.abs(
                expansion.reconstruct() - Monotones.tensor_power_state(theta, n).amp
            ))))
            binomial.record(defect <= EXACT, defect, f"θ={theta}, n={n}")

    for _ in range(trials):
        theta_psi = rng.uniform(0.2, 1.4)
        theta_phi = rng.uniform(0.2, 1.4)
        n = int(rng.integers(1, 7))
        m = Protocols.max_copies(n, theta_psi, theta_phi)
        ok = Protocols.copies_feasible(n, m, theta_psi, theta_phi) and not Protocols.copies_feasible(
            n, m + 1, theta_psi, theta_phi
        )
        nielsen.record(ok, note=f"n={n}, θψ={theta_psi:.6g}, θφ={theta_phi:.6g}, m={m}")

    m = Protocols.max_copies(4, math.acos(0.5), math.acos(0.25))
    example.record(m == 2, abs(m - 2))

    theta_psi = rng.uniform(0.2, 1.4)
    theta_phi = rng.uniform(0.2, 1.4)
    rate = Protocols.asymptotic_rate(theta_psi, theta_phi)
    for n in (10 ** 3, 10 ** 6):
        defect = abs(Protocols.max_copies(n, theta_psi, theta_phi) / n - rate)
        limit.record(defect <= 1.0 / n, defect, f"n={n}")

    return [brute, coupled, binomial, nielsen, example, limit]


def _basis_and_standard_form(rng: np.random.Generator, trials: int, tolerance: float) -> List[PropertyCheck]:
    return basis_suite(rng, trials, tolerance) + standard_form_suite(rng, trials, tolerance)


SUITES: Dict[str, Callable[[np.random.Generator, int, float], List[PropertyCheck]]] = {
    "basis": _basis_and_standard_form,
    "trio": trio_suite,
    "monotone": monotone_suite,
    "protocols": protocols_suite,
    "asymptotic": asymptotic_suite,
}
SUITE_NAMES = tuple(SUITES.keys())


def run_suites(name: str, seed: int, trials: int, tolerance: float) -> VerificationResult:
    """
    스위트 실행

    Args:
        name: 스위트 이름 또는 "all"
        seed: 난수 시드
        trials: 속성당 시행 수
        tolerance: 단조성 검사 허용치

    Returns:
        VerificationResult

    Raises:
        UsageError: 알 수 없는 스위트
    """
    if name == "all":
        names = list(SUITE_NAMES)
    elif name in SUITES:
        names = [name]
    else:
        raise UsageError(f"알 수 없는 스위트: {name} (가능: {', '.join(SUITE_NAMES)}, all)")

    checks: List[PropertyCheck] = []
    for suite in names:
        logger.debug("스위트 실행: %s (seed=%d, trials=%d)", suite, seed, trials)
        checks.extend(SUITES[suite](np.random.default_rng(seed), trials, tolerance))
    return VerificationResult.from_checks(checks, seed=seed, trials=trials)
