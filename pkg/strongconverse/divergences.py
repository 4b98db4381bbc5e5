# /strongconverse/divergences.py
# Entropías relativas de Umegaki y Rényi "sandwiched", entropías e
# informaciones mutuas, la conjugación Θ_σ, normas 1→α y la cota de Nagaoka.

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import DEFAULT_BUDGET, linalg
from .channels import KrausMap, as_kraus_map
from .errors import DimensionMismatch, InvalidOrder, InvalidParameter, InvalidProbability, NotSeparableInput
from .models import InequalityCheck, NormEstimate
from .optimize import (
    CERTIFICATION_GRID,
    OutputNormObjective,
    batch_log2_trace_power,
    maximize_over_pure_states,
    regularize,
)
from .states import matrix_of

logger = logging.getLogger(__name__)

KERNEL_MASS_TOL = 1e-9
ORTHOGONAL_TOL = 1e-12
NAGAOKA_SLACK = 1e-7
KING_SLACK = 1e-6
BACKTRACK_STEPS = 6


@dataclass(frozen=True)
class RenyiOrder:
    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not np.isfinite(a) or a <= 0 or a == 1.0:
            raise InvalidOrder(f"α={self.alpha} fuera de (0,1)∪(1,∞)")
        object.__setattr__(self, "alpha", a)

    @property
    def dpi_valid(self):
        return self.alpha >= 0.5


def _order(alpha):
    return alpha.alpha if isinstance(alpha, RenyiOrder) else RenyiOrder(alpha).alpha


def _pair(rho, sigma):
    r, s = matrix_of(rho), matrix_of(sigma)
    if r.shape != s.shape:
        raise DimensionMismatch(f"Dimensiones distintas: {r.shape} y {s.shape}")
    return r, s


def _kernel_mass(r, spec_s):
    proj = linalg.support_projector(None, spec_s)
    support_mass = float(np.real(np.sum(proj.T * r)))
    return float(np.real(np.trace(r))) - support_mass, support_mass


def sandwiched_renyi(rho, sigma, alpha):
    """D̃_α(ρ‖σ) en bits; +∞ cuando no se cumple la condición de soporte."""
    a = _order(alpha)
    r, s = _pair(rho, sigma)
    spec_s = linalg.psd_spectrum(s)
    kernel, overlap = _kernel_mass(r, spec_s)
    if a > 1 and kernel > KERNEL_MASS_TOL:
        return np.inf
    if overlap <= ORTHOGONAL_TOL:
        return np.inf
    s_pow = linalg.fractional_power(s, (1.0 - a) / (2.0 * a), spec_s)
    x = s_pow @ r @ s_pow
    w = np.linalg.eigvalsh((x + x.conj().T) / 2)
    return float(linalg.log2_trace_power(w, a) / (a - 1.0))


def relative_entropy(rho, sigma):
    """D(ρ‖σ) = Tr[ρ(log₂ρ − log₂σ)]; +∞ si supp ρ ⊄ supp σ."""
    r, s = _pair(rho, sigma)
    spec_s = linalg.psd_spectrum(s)
    kernel, _ = _kernel_mass(r, spec_s)
    if kernel > KERNEL_MASS_TOL:
        return np.inf
    log_s = linalg.log2_on_support(s, spec_s)
    return float(-von_neumann_entropy(r) - np.real(np.sum(r.T * log_s)))


def von_neumann_entropy(rho):
    w = np.linalg.eigvalsh(matrix_of(rho))
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log2(w)))


def entropy_of_registers(rho, dims, keep):
    return von_neumann_entropy(linalg.partial_trace(matrix_of(rho), dims, keep))


def mutual_information(rho, cut):
    """I(A;B) = H(A) + H(B) − H(AB) a través de un corte bipartito."""
    r = matrix_of(rho)
    cut.check(r)
    dims = [cut.d_a, cut.d_b]
    return (
        entropy_of_registers(r, dims, [0]) + entropy_of_registers(r, dims, [1]) - von_neumann_entropy(r)
    )


def register_mutual_information(rho, dims, a, b):
    """I(A;B) entre dos grupos de registros disjuntos de un estado multipartito."""
    a, b = list(a), list(b)
    if not a or not b:
        return 0.0
    return (
        entropy_of_registers(rho, dims, a) + entropy_of_registers(rho, dims, b)
        - entropy_of_registers(rho, dims, a + b)
    )


def conditional_mutual_information(rho, dims, partition):
    """I(A;B|C) = H(AC) + H(BC) − H(ABC) − H(C)."""
    a, b, c = (list(p) for p in partition)
    if set(a) & set(b) or set(a) & set(c) or set(b) & set(c):
        raise DimensionMismatch("Las particiones A, B y C deben ser disjuntas")
    h_c = entropy_of_registers(rho, dims, c) if c else 0.0
    return (
        entropy_of_registers(rho, dims, a + c) + entropy_of_registers(rho, dims, b + c)
        - entropy_of_registers(rho, dims, a + b + c) - h_c
    )


def theta_conjugation(sigma, rho):
    """Θ_σ(ρ) = σ^{1/2} ρ σ^{1/2}."""
    root = linalg.fractional_power(matrix_of(sigma), 0.5)
    return root @ matrix_of(rho) @ root


def conjugated_channel(s, ch):
    """Mapa CP X ↦ S N(X) S con S hermítica, en forma de Kraus."""
    return KrausMap(tuple(s @ k for k in as_kraus_map(ch).stacked))


def one_to_alpha_norm(kmap, alpha, budget=None, seed=None, grid=None):
    """ν_α(M) = sup_ψ ‖M(ψ)‖_α para un mapa CP M.

    Para α = 1 el valor es exacto: λ_max(M†(I)). Para entradas de qubit se
    evalúa además una rejilla de Bloch 721×361 como referencia.
    """
    if alpha < 1:
        raise InvalidOrder(f"ν_α requiere α ≥ 1, se recibió {alpha}")
    budget = budget or DEFAULT_BUDGET
    if alpha == 1:
        adj = kmap.adjoint_apply(np.eye(kmap.d_out))
        w, v = np.linalg.eigh((adj + adj.conj().T) / 2)
        return NormEstimate(value=float(w[-1]), best_input=v[:, -1], restarts=0)
    objective = OutputNormObjective(kmap, alpha)
    grid = grid if grid is not None else (CERTIFICATION_GRID if kmap.d_in == 2 else None)
    value, psi, grid_best = maximize_over_pure_states(objective, max(budget, 20), seed, grid=grid)
    logger.debug("[nu-alfa] α=%.4g ν=%.10f", alpha, 2.0 ** value)
    return NormEstimate(
        value=float(2.0 ** value),
        best_input=psi,
        restarts=max(budget, 20),
        grid_value=None if grid_best is None else float(2.0 ** grid_best),
    )


def nagaoka_bound(p, q, alpha):
    """(1/(α−1)) log₂(p^α q^{1−α}), con q=0<p ↦ +∞ y p=0 ↦ −∞."""
    if alpha <= 1:
        raise InvalidOrder(f"La cota de Nagaoka requiere α > 1, se recibió {alpha}")
    for name, value in (("p", p), ("q", q)):
        if not 0.0 <= value <= 1.0:
            raise InvalidProbability(f"{name}={value} fuera de [0, 1]")
    if p == 0:
        return -np.inf
    if q == 0:
        return np.inf
    return float((alpha * np.log2(p) + (1.0 - alpha) * np.log2(q)) / (alpha - 1.0))


def _check_effect(lam):
    w = np.linalg.eigvalsh(lam)
    if w[0] < -1e-9 or w[-1] > 1 + 1e-9:
        raise InvalidParameter("Λ debe cumplir 0 ≤ Λ ≤ I")


def verify_nagaoka(rho, sigma, effect, alpha, slack=NAGAOKA_SLACK):
    """Comprueba D̃_α(ρ‖σ) ≥ (1/(α−1)) log₂(p^α q^{1−α}) con p=Tr Λρ, q=Tr Λσ."""
    r, s = _pair(rho, sigma)
    lam = linalg.check_hermitian(effect)
    _check_effect(lam)
    p = float(np.clip(np.real(np.sum(lam.T * r)), 0.0, 1.0))
    q = float(np.clip(np.real(np.sum(lam.T * s)), 0.0, 1.0))
    divergence = sandwiched_renyi(r, s, alpha)
    bound = nagaoka_bound(p, q, alpha)
    holds = divergence == np.inf or bound == -np.inf or divergence >= bound - slack
    return InequalityCheck(holds=bool(holds), lhs=bound, rhs=divergence, details={"p": p, "q": q})


def verify_king(kmap, terms, alpha, budget=None, seed=None, slack=KING_SLACK):
    """Comprueba ‖(M⊗id)(P_AB)‖_α ≤ ν_α(M)·‖P_B‖_α para P_AB = Σ_j C_j ⊗ D_j separable."""
    cs, ds = [], []
    for c, d in terms:
        c, d = linalg.check_hermitian(c), linalg.check_hermitian(d)
        if np.linalg.eigvalsh(c)[0] < -1e-9 or np.linalg.eigvalsh(d)[0] < -1e-9:
            raise NotSeparableInput("Cada término C_j, D_j debe ser semidefinido positivo")
        cs.append(c)
        ds.append(d)
    if not cs:
        raise NotSeparableInput("Se necesita al menos un término")
    d_b = ds[0].shape[0]
    if any(c.shape[0] != kmap.d_in for c in cs) or any(d.shape[0] != d_b for d in ds):
        raise DimensionMismatch("Los términos no coinciden con las dimensiones del mapa")
    output = sum(linalg.kron(kmap.apply_to(c), d) for c, d in zip(cs, ds))
    marginal = sum(np.real(np.trace(c)) * d for c, d in zip(cs, ds))
    nu = one_to_alpha_norm(kmap, alpha, budget, seed)
    lhs = linalg.schatten_norm(output, alpha)
    rhs = nu.value * linalg.schatten_norm(marginal, alpha)
    holds = lhs <= rhs + slack * max(1.0, rhs)
    return InequalityCheck(holds=bool(holds), lhs=lhs, rhs=rhs, details={"nu": nu.value})


# ---------------------- χ̃_α de un ensamble fijo ----------------------

def log2_weighted_sum(probs, logs):
    """log₂ Σ p_x 2^{logs_x} sin desbordes."""
    mask = probs > 0
    top = np.max(logs[mask])
    return float(top + np.log2(np.sum(probs[mask] * np.exp2(logs[mask] - top))))


def alpha_scores(outputs, sigma, alpha):
    """log₂ Tr[(σ^γ ω_x σ^γ)^α] para cada salida, con γ = (1−α)/(2α)."""
    s = linalg.fractional_power(regularize(sigma), (1.0 - alpha) / (2.0 * alpha))
    x = s @ outputs @ s
    w, v = np.linalg.eigh((x + np.conj(np.swapaxes(x, -1, -2))) / 2)
    return batch_log2_trace_power(w, alpha), w, v


def alpha_objective(probs, outputs, sigma, alpha):
    logq, _, _ = alpha_scores(outputs, sigma, alpha)
    return log2_weighted_sum(probs, logq) / (alpha - 1.0)


def fixed_point_step(probs, w, v, sigma, alpha):
    """σ ← [σ^{(α−1)/2} T(σ) σ^{(α−1)/2}]^{1/α} normalizado, T(σ) = Σ p_x (σ^γ ω_x σ^γ)^α.

    Los puntos fijos son los de σ ∝ T(σ); con salidas que conmutan el paso
    llega en una iteración a σ ∝ (Σ p_x ω_x^α)^{1/α}.
    """
    lam = np.clip(w, 0.0, None)
    top = lam.max()
    weights = probs[:, None] * (lam / top) ** alpha
    t = np.einsum("nik,nk,njk->ij", v, weights, v.conj())
    s, u = np.linalg.eigh(regularize(sigma))
    s = np.clip(s, 0.0, None)
    h = (s / s.max()) ** ((alpha - 1.0) / 2.0)
    b = (u.conj().T @ t @ u) * np.outer(h, h)
    bw, bv = np.linalg.eigh((b + b.conj().T) / 2)
    bw = np.clip(bw, 0.0, None)
    root = (bv * (bw / bw.max()) ** (1.0 / alpha)) @ bv.conj().T
    new = u @ root @ u.conj().T
    new = (new + new.conj().T) / 2
    return new / np.trace(new).real


def _polish_sigma(probs, outputs, alpha, sigma):
    """Descenso local sobre σ = AA†/Tr(AA†) cuando el punto fijo no converge."""
    d = sigma.shape[0]
    a0 = linalg.fractional_power(regularize(sigma), 0.5)

    def fun(x):
        a = x[:d * d].reshape(d, d) + 1j * x[d * d:].reshape(d, d)
        s = a @ a.conj().T
        return alpha_objective(probs, outputs, s / np.trace(s).real, alpha)

    x0 = np.concatenate([a0.real.reshape(-1), a0.imag.reshape(-1)])
    res = minimize(fun, x0, method="L-BFGS-B", options={"maxiter": 300, "ftol": 1e-15})
    a = res.x[:d * d].reshape(d, d) + 1j * res.x[d * d:].reshape(d, d)
    s = a @ a.conj().T
    return s / np.trace(s).real


def alpha_barycenter(probs, outputs, alpha, sigma0=None, max_iter=500, tol=1e-12):
    """argmin_σ Σ_x p_x Tr[(σ^γ ω_x σ^γ)^α] por el paso de fixed_point_step.

    Un paso sólo se acepta si no empeora el objetivo; si no lo hace se
    retrocede sobre el segmento hacia el candidato. Sin convergencia se pule
    con descenso local. Devuelve (σ, valor en bits, log₂ Q_x).
    """
    probs = np.asarray(probs, dtype=float)
    outputs = np.asarray(outputs, dtype=complex)
    sigma = np.tensordot(probs, outputs, axes=1) if sigma0 is None else np.asarray(sigma0, dtype=complex)
    sigma = sigma / np.trace(sigma).real
    logq, w, v = alpha_scores(outputs, sigma, alpha)
    value = log2_weighted_sum(probs, logq) / (alpha - 1.0)
    converged = False
    for _ in range(max_iter):
        candidate = fixed_point_step(probs, w, v, sigma, alpha)
        for k in range(BACKTRACK_STEPS):
            delta = 0.5 ** k
            trial = candidate if k == 0 else (1.0 - delta) * sigma + delta * candidate
            trial_logq, trial_w, trial_v = alpha_scores(outputs, trial, alpha)
            trial_value = log2_weighted_sum(probs, trial_logq) / (alpha - 1.0)
            if trial_value <= value + 1e-14:
                break
        else:
            break
        moved = np.max(np.abs(trial - sigma))
        sigma, value, logq, w, v = trial, trial_value, trial_logq, trial_w, trial_v
        if moved < tol:
            converged = True
            break
    if not converged:
        polished = _polish_sigma(probs, outputs, alpha, sigma)
        if alpha_objective(probs, outputs, polished, alpha) < value:
            logger.debug("[baricentro] punto fijo sin converger, se usa el descenso local")
            sigma = polished
            logq, _, _ = alpha_scores(outputs, sigma, alpha)
            value = log2_weighted_sum(probs, logq) / (alpha - 1.0)
    return sigma, value, logq


def ensemble_alpha_holevo(probs, outputs, alpha):
    """χ̃_α({p_x, ω_x}) = inf_σ D̃_α(ρ_XB‖ρ_X⊗σ) = inf_σ (1/(α−1)) log₂ Σ p_x Tr[(σ^γ ω_x σ^γ)^α].

    Devuelve (valor, σ óptimo).
    """
    a = _order(alpha)
    if a < 1:
        raise InvalidOrder("χ̃_α de un ensamble se define aquí para α > 1")
    outputs = np.array([matrix_of(o) for o in outputs])
    sigma, value, _ = alpha_barycenter(np.asarray(probs, dtype=float), outputs, a)
    return value, sigma
