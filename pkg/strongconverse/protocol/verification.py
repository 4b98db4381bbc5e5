# /strongconverse/protocol/verification.py
# Comprobaciones sobre protocolos simulados: la cota de converso fuerte,
# la separabilidad Alice:Bob y la cadena de informaciones del converso débil.

import logging

import numpy as np

from ..capacities import holevo_information, strong_converse_exponent
from ..channels import EbVerdict, is_entanglement_breaking
from ..divergences import conditional_mutual_information, register_mutual_information
from ..errors import InvalidParameter, NotEntanglementBreaking
from ..models import ChainReport, SeparabilityCheck, SimulationReport
from ..states import group_registers, is_ppt
from .decoders import decode, success_probability
from .simulator import simulate

logger = logging.getLogger(__name__)

BOUND_SLACK = 1e-9
PPT_TOL = 1e-9
CHAIN_SLACK = 1e-6
IDENTITY_TOL = 1e-9
PROCESSING_TOL = 1e-8


def _steps(trajectory):
    return trajectory.steps if hasattr(trajectory, "steps") else list(trajectory)


def verify_separability(trajectory, tol=PPT_TOL):
    """PPT de cada estado condicional, en cada etapa, a través del corte Alice:Bob."""
    checks = []
    for state in _steps(trajectory):
        alice = state.alice_registers
        for m, rho in enumerate(state.states):
            permuted, cut = group_registers(rho, state.dims, alice)
            if cut.d_a == 1 or cut.d_b == 1:
                checks.append(SeparabilityCheck(state.round_index, state.stage, m, 0.0, True))
                continue
            report = is_ppt(permuted, cut, tol)
            checks.append(SeparabilityCheck(
                state.round_index, state.stage, m, report.min_eigenvalue, bool(report.is_ppt),
            ))
    failures = [c for c in checks if not c.is_ppt]
    if failures:
        worst = min(failures, key=lambda c: c.min_eigenvalue)
        logger.warning(
            "[separabilidad] %d estados no PPT; peor: ronda %d (%s) m=%d λ=%.3e",
            len(failures), worst.round_index, worst.stage, worst.message, worst.min_eigenvalue,
        )
    return checks


def message_information(trajectory):
    """I(M;B_iB′_{i−1}) tras cada uso del canal."""
    values = []
    for state in _steps(trajectory):
        if state.stage != "canal":
            continue
        joint, dims = state.joint_with_message()
        bob = [k + 1 for k in state.bob_registers]
        values.append(float(register_mutual_information(joint, dims, [0], bob)))
    return values


def verify_weak_converse_chain(trajectory, ch, chi=None, budget=None, seed=None):
    """Cadena ronda a ronda: I(M;B_iB′_{i−1}) ≤ I(M;B′_{i−1}) + χ(N).

    χ(N) se toma por su cota superior (valor + gap) salvo que se indique.
    También comprueba I(M;B|B′) = I(M;BB′) − I(M;B′), I(M;B|B′) ≤ I(MB′;B)
    y el procesamiento local I(M;B′_i) ≤ I(M;B_iB′_{i−1}).
    """
    if getattr(trajectory, "protocol", None) is not None:
        protocol = trajectory.protocol
        if is_entanglement_breaking(ch) != EbVerdict.EB and not protocol.separable_inputs:
            logger.warning("[cadena] el canal no es EB y el protocolo no declara entradas separables")
    if chi is None:
        chi = holevo_information(ch, budget, seed).upper_bound
    report = ChainReport(chi=float(chi))
    steps = _steps(trajectory)
    previous = None
    n_rounds = 0
    for k, state in enumerate(steps):
        if state.stage != "canal":
            continue
        n_rounds += 1
        joint, dims = state.joint_with_message()
        # Registros en joint: M, A′_i, B_i, B′_{i−1}
        m, b, mem = [0], [2], [3]
        mi_joint = register_mutual_information(joint, dims, m, b + mem)
        mi_memory = register_mutual_information(joint, dims, m, mem)
        cmi = conditional_mutual_information(joint, dims, (m, b, mem))
        mi_sender = register_mutual_information(joint, dims, m + mem, b)
        row = {
            "round": state.round_index,
            "mi_joint": float(mi_joint),
            "mi_memory": float(mi_memory),
            "cmi": float(cmi),
            "mi_sender_side": float(mi_sender),
        }
        if abs(cmi - (mi_joint - mi_memory)) > IDENTITY_TOL:
            report.failures.append(f"ronda {state.round_index}: identidad de la cadena")
        if cmi > mi_sender + PROCESSING_TOL:
            report.failures.append(f"ronda {state.round_index}: I(M;B|B′) > I(MB′;B)")
        if mi_joint > mi_memory + chi + CHAIN_SLACK:
            report.failures.append(f"ronda {state.round_index}: I(M;BB′) > I(M;B′) + χ")
        if previous is not None and mi_memory > previous + PROCESSING_TOL:
            report.failures.append(f"ronda {state.round_index}: la memoria de Bob ganó información")
        nxt = steps[k + 1] if k + 1 < len(steps) else None
        if nxt is not None and nxt.stage == "decodificador":
            j, d = nxt.joint_with_message()
            row["mi_next_memory"] = float(register_mutual_information(j, d, [0], [3]))
            if row["mi_next_memory"] > mi_joint + PROCESSING_TOL:
                report.failures.append(f"ronda {state.round_index}: el decodificador creó información")
            previous = row["mi_next_memory"]
        report.rounds.append(row)
    report.cumulative = report.rounds[-1]["mi_joint"] if report.rounds else 0.0
    report.cumulative_ok = report.cumulative <= n_rounds * chi + CHAIN_SLACK
    for failure in report.failures:
        logger.warning("[cadena] %s", failure)
    return report


def verify_strong_converse_bound(p, decoder="best", alpha_grid=None, budget=None, seed=None, curve=None):
    """Comprueba p_succ ≤ 2^{−n·E(R)} con R = log₂L / n.

    El exponente usa la cota superior de χ̃_α, así que sólo puede debilitar
    la cota. `curve` permite reutilizar una curva ya calculada para la misma tasa.
    """
    verdict = is_entanglement_breaking(p.channel)
    if verdict != EbVerdict.EB and not p.separable_inputs:
        raise NotEntanglementBreaking(
            f"Veredicto {verdict.value}: el protocolo debe declarar entradas separables",
        )
    rate = p.rate
    if curve is None:
        curve = strong_converse_exponent(p.channel, rate, alpha_grid, budget, seed)
    elif abs(curve.rate - rate) > 1e-12:
        raise InvalidParameter(f"La curva es para R={curve.rate}, el protocolo tiene R={rate}")

    final, trajectory = simulate(p)
    if decoder == "protocol":
        if p.final_povm is None:
            raise InvalidParameter("El protocolo no define un POVM final")
        povm, name = p.final_povm, "protocol"
    else:
        povm, name = decode(final, decoder)
    p_succ = success_probability(final, povm)
    if decoder == "best" and p.final_povm is not None:
        own = success_probability(final, p.final_povm)
        if own > p_succ:
            p_succ, name = own, "protocol"

    bound = curve.bound(p.n_rounds)
    checks = verify_separability(trajectory)
    report = SimulationReport(
        p_succ=p_succ,
        rate=rate,
        bound=bound,
        exponent=curve.exponent,
        decoder=name,
        separability_checks=checks,
        mi_chain=message_information(trajectory),
        bound_ok=bool(p_succ <= bound + BOUND_SLACK),
        separability_ok=all(c.is_ppt for c in checks),
    )
    if not report.bound_ok:
        logger.warning("[cota] p_succ=%.12f supera la cota %.12f", p_succ, bound)
    logger.info("[cota] R=%.6f p_succ=%.10f cota=%.10f (%s)", rate, p_succ, bound, name)
    return report
