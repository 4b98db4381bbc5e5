# /strongconverse/protocol/decoders.py
# Mediciones finales de Bob: PGM, Helstrom, base computacional y uniforme.

import logging
import warnings

import numpy as np

from .. import linalg
from ..errors import DimensionMismatch, InvalidParameter, SingularGramFallback
from ..states import Povm

logger = logging.getLogger(__name__)

COMPLETION_TOL = 1e-10
DECODERS = ("pgm", "helstrom", "computational", "uniform", "best")


def _final_states(final):
    """Acepta un ProtocolState o directamente la lista de estados de Bob."""
    if hasattr(final, "bob_states"):
        return [np.asarray(s, dtype=complex) for s in final.bob_states()]
    return [np.asarray(s, dtype=complex) for s in final]


def success_probability(final, povm):
    """p_succ = (1/L) Σ_m Tr[D^m ρ^m], recortada a [0, 1]."""
    states = _final_states(final)
    if len(povm) != len(states):
        raise DimensionMismatch(f"El POVM tiene {len(povm)} elementos para {len(states)} mensajes")
    if povm.dim != states[0].shape[0]:
        raise DimensionMismatch(f"POVM de dimensión {povm.dim}, estados de dimensión {states[0].shape[0]}")
    total = sum(np.real(np.sum(d.T * rho)) for d, rho in zip(povm.elements, states))
    return float(np.clip(total / len(states), 0.0, 1.0))


def pgm_decoder(final):
    """D^m = S^{−1/2}(ρ^m/L)S^{−1/2} con S = Σ ρ^m/L; el resto I − ΣD^m se reparte."""
    states = _final_states(final)
    L = len(states)
    weighted = [s / L for s in states]
    s_inv_half = linalg.fractional_power(sum(weighted), -0.5)
    elements = [s_inv_half @ w @ s_inv_half for w in weighted]
    d = states[0].shape[0]
    remainder = np.eye(d) - sum(elements)
    if np.max(np.abs(remainder)) > COMPLETION_TOL:
        warnings.warn(
            f"Gram singular: se completa el POVM con (I − ΣD^m)/{L}", SingularGramFallback, stacklevel=2,
        )
        elements = [e + remainder / L for e in elements]
    return Povm(tuple(elements))


def helstrom_decoder(final):
    """Proyector sobre la parte positiva de (ρ¹ − ρ²)/2 y su complemento."""
    states = _final_states(final)
    if len(states) != 2:
        raise InvalidParameter(f"Helstrom requiere L = 2, se recibió L = {len(states)}")
    delta = (states[0] - states[1]) / 2
    w, v = np.linalg.eigh((delta + delta.conj().T) / 2)
    pos = v[:, w > 0]
    p_plus = pos @ pos.conj().T
    return Povm((p_plus, np.eye(len(w)) - p_plus))


def helstrom_success(final):
    """1/2 + ‖ρ¹ − ρ²‖₁/4."""
    states = _final_states(final)
    return 0.5 + linalg.schatten_norm(states[0] - states[1], 1) / 4.0


def computational_decoder(final):
    """Mejor decodificador proyectivo en la base computacional.

    Cada |k⟩ se asigna al mensaje con mayor ⟨k|ρ^m|k⟩.
    """
    states = _final_states(final)
    diag = np.array([np.real(np.diag(s)) for s in states])
    winners = np.argmax(diag, axis=0)
    elements = [np.diag((winners == m).astype(complex)) for m in range(len(states))]
    return Povm(tuple(elements))


def uniform_decoder(final):
    states = _final_states(final)
    L, d = len(states), states[0].shape[0]
    return Povm(tuple(np.eye(d, dtype=complex) / L for _ in range(L)))


def decode(final, strategy="best"):
    """Devuelve (POVM, nombre) para la estrategia pedida; "best" toma el máximo."""
    strategy = strategy.lower()
    if strategy not in DECODERS:
        raise InvalidParameter(f"Decodificador desconocido: {strategy}")
    if strategy != "best":
        builder = {
            "pgm": pgm_decoder,
            "helstrom": helstrom_decoder,
            "computational": computational_decoder,
            "uniform": uniform_decoder,
        }[strategy]
        return builder(final), strategy

    states = _final_states(final)
    candidates = ["pgm", "computational", "uniform"] + (["helstrom"] if len(states) == 2 else [])
    best = None
    for name in candidates:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SingularGramFallback)
            povm, _ = decode(states, name)
        p = success_probability(states, povm)
        logger.debug("[decodificador] %s: p_succ=%.12f", name, p)
        if best is None or p > best[0]:
            best = (p, povm, name)
    return best[1], best[2]
