# /strongconverse/capacities.py
# Información de Holevo, radios de información, información α-Holevo y el
# exponente de converso fuerte de un canal.

import logging
import warnings

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from . import DEFAULT_BUDGET, DEFAULT_SEED, linalg
from .channels import EbVerdict, as_kraus_map, is_entanglement_breaking, tensor_channels
from .divergences import (
    alpha_barycenter,
    alpha_scores,
    ensemble_alpha_holevo,
    fixed_point_step,
    log2_weighted_sum,
    mutual_information,
)
from .errors import BudgetExhausted, DimensionMismatch, InvalidOrder, InvalidParameter
from .models import AdditivityReport, CapacityResult, ExponentCurve
from .optimize import (
    COARSE_GRID,
    RelativeEntropyObjective,
    SandwichedObjective,
    maximize_over_pure_states,
    parallel_map,
    projectors,
)
from .states import BipartiteCut, Ensemble, cq_state, matrix_of

logger = logging.getLogger(__name__)

HOLEVO_CERT_TOL = 1e-4
RADIUS_TOL = 1e-6
ALPHA_RADIUS_TOL = 1e-5
ALPHA_STALL_ROUNDS = 3
ROUTE_CONSISTENCY_TOL = 1e-4
MONOTONE_TOL = 1e-4
ALPHA_CAP = 2.0 ** 20
WEIGHT_FLOOR = 1e-12


def default_alpha_grid():
    """{1 + 2^{−k}: k = 0..10} ∪ {2, 3, 4, 6, 8, 12, 16, 24, 32}, ordenada."""
    near_one = [1.0 + 2.0 ** (-k) for k in range(11)]
    return sorted(set(near_one + [2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0]))


def _outputs(kmap, psis):
    return kmap.apply_to(projectors(psis))


def _hermitian_eigh(batch):
    return np.linalg.eigh((batch + np.conj(np.swapaxes(batch, -1, -2))) / 2)


def _neg_entropies(outputs):
    w = np.clip(np.linalg.eigvalsh(outputs), 0.0, None)
    safe = np.where(w > 0, w, 1.0)
    return np.sum(w * np.log2(safe), axis=-1)


def _log2_support(m):
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    mask = w > 1e-14 * max(w.max(), 1e-300)
    logs = np.zeros_like(w)
    logs[mask] = np.log2(w[mask])
    return (v * logs) @ v.conj().T


def _ba_scores(outputs, neg_h, probs):
    """D(ω_x‖ρ̄) para cada x y la información mutua Σ p_x D(ω_x‖ρ̄)."""
    log_bar = _log2_support(np.tensordot(probs, outputs, axes=1))
    scores = neg_h - np.real(np.einsum("nij,ji->n", outputs, log_bar))
    return scores, float(probs @ scores)


def blahut_arimoto(outputs, probs, max_iter=2000, tol=1e-13):
    """Pesos óptimos para salidas fijas: p_x ← p_x·2^{D(ω_x‖ρ̄)} normalizado."""
    neg_h = _neg_entropies(outputs)
    probs = np.asarray(probs, dtype=float)
    for _ in range(max_iter):
        scores, value = _ba_scores(outputs, neg_h, probs)
        if scores.max() - value < tol:
            break
        probs = probs * np.exp2(scores - scores.max())
        probs = probs / probs.sum()
    scores, value = _ba_scores(outputs, neg_h, probs)
    return probs, value, scores


def _joint_objective(kmap, n, d):
    """−I(X;B) como función de (log-pesos, vectores de estado) con gradiente."""

    def fun(x):
        theta = x[:n]
        z = x[n:n + n * d].reshape(n, d) + 1j * x[n + n * d:].reshape(n, d)
        norms = np.real(np.sum(z.conj() * z, axis=1))
        probs = np.exp(theta - theta.max())
        probs = probs / probs.sum()
        ps = np.einsum("ni,nj->nij", z, z.conj()) / norms[:, None, None]
        outputs = kmap.apply_to(ps)
        w, v = _hermitian_eigh(outputs)
        w = np.clip(w, 0.0, None)
        logs = np.where(w > 1e-300, np.log2(np.where(w > 1e-300, w, 1.0)), 0.0)
        log_out = np.einsum("nik,nk,njk->nij", v, logs, v.conj())
        neg_h = np.sum(w * logs, axis=1)
        log_bar = _log2_support(np.tensordot(probs, outputs, axes=1))
        scores = neg_h - np.real(np.einsum("nij,ji->n", outputs, log_bar))
        value = float(probs @ scores)

        grad_theta = probs * (scores - value)
        g = kmap.adjoint_apply(log_out - log_bar[None, :, :]) * probs[:, None, None]
        g = (g + np.conj(np.swapaxes(g, -1, -2))) / 2
        gz = np.einsum("nij,nj->ni", g, z)
        mean = np.real(np.sum(z.conj() * gz, axis=1)) / norms
        wz = (gz - mean[:, None] * z) * (2.0 / norms[:, None])
        grad = np.concatenate([grad_theta, wz.real.reshape(-1), wz.imag.reshape(-1)])
        return -value, -grad

    return fun


def _polish_ensemble(kmap, psis, probs, maxiter=300):
    n, d = psis.shape
    theta = np.log(np.clip(probs, 1e-300, None))
    x0 = np.concatenate([theta, psis.real.reshape(-1), psis.imag.reshape(-1)])
    res = minimize(
        _joint_objective(kmap, n, d), x0, jac=True, method="L-BFGS-B",
        options={"maxiter": maxiter, "ftol": 1e-15, "gtol": 1e-11},
    )
    x = res.x
    z = x[n:n + n * d].reshape(n, d) + 1j * x[n + n * d:].reshape(n, d)
    z = z / np.linalg.norm(z, axis=1, keepdims=True)
    probs = np.exp(x[:n] - x[:n].max())
    return z, probs / probs.sum()


def _optimize_ensemble(kmap, psis, probs, rounds=2):
    """Alterna pesos (Blahut–Arimoto) y ascenso conjunto sobre estados."""
    outputs = _outputs(kmap, psis)
    probs, value, _ = blahut_arimoto(outputs, probs, max_iter=200)
    for _ in range(rounds):
        new_psis, new_probs = _polish_ensemble(kmap, psis, probs)
        outputs = _outputs(kmap, new_psis)
        new_probs, new_value, _ = blahut_arimoto(outputs, new_probs, max_iter=500)
        if new_value < value + 1e-13:
            break
        psis, probs, value = new_psis, new_probs, new_value
    outputs = _outputs(kmap, psis)
    probs, value, scores = blahut_arimoto(outputs, probs)
    return psis, probs, value, scores


def _random_states(rng, n, d):
    z = linalg.ginibre(n, d, rng)
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def _initial_states(rng, d, n, include_basis):
    psis = _random_states(rng, n, d)
    if include_basis:
        psis[:min(d, n)] = np.eye(d, dtype=complex)[:min(d, n)]
    return psis


def _principal_vectors(states):
    vecs = []
    for s in states:
        w, v = np.linalg.eigh(matrix_of(s))
        vecs.append(v[:, -1])
    return np.array(vecs)


def _witness_ensemble(psis, probs):
    keep = probs > WEIGHT_FLOOR
    p = probs[keep] / probs[keep].sum()
    return Ensemble(tuple(p), tuple(projectors(psis[keep])))


def _finish(result, strict, tag):
    if not result.converged:
        logger.warning("[%s] sin convergencia: valor=%.8f gap=%.2e", tag, result.value, result.gap_estimate)
        if strict:
            raise BudgetExhausted(f"{tag}: presupuesto agotado con gap {result.gap_estimate:.2e}", result)
    return result


def holevo_of_ensemble(e, ch):
    """I(X;B) del estado clásico-cuántico Σ p_x |x⟩⟨x| ⊗ N(ρ_x)."""
    kmap = as_kraus_map(ch)
    if e.dim != kmap.d_in:
        raise DimensionMismatch(f"Ensamble de dimensión {e.dim}, canal con d_in={kmap.d_in}")
    outputs = kmap.apply_to(np.array(e.states))
    cq = cq_state(Ensemble(e.probs, tuple(outputs)))
    return mutual_information(cq, BipartiteCut(len(e), kmap.d_out))


def _best_ensemble(kmap, n_restarts, seed, initial_ensemble=None):
    d = kmap.d_in
    n_states = d * d
    seeds = linalg.spawn_seeds(seed, n_restarts)

    def restart(k):
        rng = np.random.default_rng(seeds[k])
        if k == 0 and initial_ensemble is not None:
            psis = _principal_vectors(initial_ensemble.states)
            probs = np.asarray(initial_ensemble.probs, dtype=float)
        else:
            psis = _initial_states(rng, d, n_states, include_basis=(k == 0))
            probs = np.full(n_states, 1.0 / n_states)
        result = _optimize_ensemble(kmap, psis, probs)
        logger.debug("[holevo] reinicio %d: valor=%.10f", k, result[2])
        return result

    results = parallel_map(restart, range(n_restarts))
    return max(results, key=lambda r: r[2])


def holevo_information(ch, budget=None, seed=None, initial_ensemble=None, strict=False):
    """χ(N) = sup I(X;B) sobre ensambles de ≤ d_in² estados puros.

    gap_estimate = sup_ψ D(N(ψ)‖ρ̄_B) − valor acota el error por la
    caracterización como radio de información.
    """
    kmap = as_kraus_map(ch)
    budget = budget or DEFAULT_BUDGET
    seed = DEFAULT_SEED if seed is None else seed
    main_seed, cert_seed = linalg.spawn_seeds(seed, 2)
    psis, probs, value, scores = _best_ensemble(kmap, budget, main_seed, initial_ensemble)
    rho_bar = np.tensordot(probs, _outputs(kmap, psis), axes=1)
    upper, _, _ = maximize_over_pure_states(
        RelativeEntropyObjective(kmap, rho_bar), max(4, budget // 4), cert_seed,
        warm_starts=psis[probs > 1e-6], grid=COARSE_GRID,
    )
    upper = max(upper, float(scores.max()))
    gap = max(upper - value, 0.0)
    result = CapacityResult(
        value=float(value),
        optimizer_witness=_witness_ensemble(psis, probs),
        iterations=budget,
        gap_estimate=float(gap),
        converged=gap <= HOLEVO_CERT_TOL,
        lower_bound=float(value),
        details={"output_average": rho_bar},
    )
    logger.info("[holevo] χ=%.10f gap=%.2e", value, gap)
    return _finish(result, strict, "holevo")


def _append_state(psis, probs, psi, weight=0.05):
    overlaps = np.abs(psis.conj() @ psi) ** 2
    if np.max(overlaps) > 1.0 - 1e-12:
        return psis, probs
    probs = np.append(probs * (1.0 - weight), weight)
    return np.vstack([psis, psi[None, :]]), probs


def information_radius(ch, budget=None, seed=None, strict=False, max_iter=None):
    """K(N) = inf_σ sup_ρ D(N(ρ)‖σ) por planos de corte.

    Cada iteración fija σ como baricentro óptimo de las peores salidas
    conocidas y añade la nueva peor entrada; el valor es la mejor cota superior.
    """
    kmap = as_kraus_map(ch)
    budget = budget or DEFAULT_BUDGET
    seed = DEFAULT_SEED if seed is None else seed
    max_iter = max_iter or 10 + budget
    init_seed, loop_seed, cert_seed = linalg.spawn_seeds(seed, 3)
    psis, probs, lower, _ = _best_ensemble(kmap, max(2, budget // 4), init_seed)
    oracle_seeds = linalg.spawn_seeds(loop_seed, max_iter)

    upper, sigma_best, converged = np.inf, None, False
    iterations = 0
    for it in range(max_iter):
        iterations = it + 1
        outputs = _outputs(kmap, psis)
        probs, value, scores = blahut_arimoto(outputs, probs)
        lower = max(lower, value)
        sigma = np.tensordot(probs, outputs, axes=1)
        sup, worst, _ = maximize_over_pure_states(
            RelativeEntropyObjective(kmap, sigma), 4, oracle_seeds[it],
            warm_starts=psis[probs > 1e-6], grid=COARSE_GRID,
        )
        sup = max(sup, float(scores.max()))
        if sup < upper:
            upper, sigma_best = sup, sigma
        logger.debug("[radio] iteración %d: L=%.10f U=%.10f", it, lower, upper)
        if upper - lower < RADIUS_TOL:
            converged = True
            break
        psis, probs = _append_state(psis, probs, worst)
        psis, probs, _, _ = _optimize_ensemble(kmap, psis, probs, rounds=1)

    certified, _, _ = maximize_over_pure_states(
        RelativeEntropyObjective(kmap, sigma_best), budget, cert_seed, grid=COARSE_GRID,
    )
    upper = max(upper, certified)
    gap = max(upper - lower, 0.0)
    result = CapacityResult(
        value=float(upper),
        optimizer_witness=sigma_best,
        iterations=iterations,
        gap_estimate=float(gap),
        converged=converged or gap <= HOLEVO_CERT_TOL,
        lower_bound=float(lower),
    )
    return _finish(result, strict, "radio")


def _alpha_weights(outputs, probs, alpha, sigma, max_iter=2000, tol=1e-9):
    """Maximiza sobre p el χ̃_α del ensamble con salidas fijas.

    Alterna un paso del punto fijo de σ con la actualización multiplicativa
    p_x ← p_x·2^{D̃_α(ω_x‖σ) − χ̃_α}; al final σ se converge para los pesos
    obtenidos.
    """
    if sigma is None:
        sigma = np.tensordot(probs, outputs, axes=1)
    for _ in range(max_iter):
        logq, w, v = alpha_scores(outputs, sigma, alpha)
        scores = logq / (alpha - 1.0)
        value = log2_weighted_sum(probs, logq) / (alpha - 1.0)
        new_sigma = fixed_point_step(probs, w, v, sigma, alpha)
        moved = np.max(np.abs(new_sigma - sigma))
        sigma = new_sigma
        if scores.max() - value < tol and moved < tol:
            break
        step = scores - value
        probs = probs * np.exp2(step - step.max())
        probs = probs / probs.sum()
    sigma, value, logq = alpha_barycenter(probs, outputs, alpha, sigma)
    return probs, sigma, value, logq / (alpha - 1.0)


def _stalled(history):
    old_upper, old_lower = history[-1 - ALPHA_STALL_ROUNDS]
    upper, lower = history[-1]
    return old_upper - upper < ALPHA_RADIUS_TOL and lower - old_lower < ALPHA_RADIUS_TOL


def alpha_information_radius(ch, alpha, budget=None, seed=None, strict=False, max_iter=None):
    """K̃_α(N) = inf_σ sup_ρ D̃_α(N(ρ)‖σ) para α > 1.

    Planos de corte: el problema restringido a las entradas conocidas se
    resuelve por el lado del ensamble (su valor es una cota inferior) y el
    oráculo de peor entrada da la cota superior. Sólo se declara convergido
    si la brecha certificada queda por debajo de 1e−5; si ninguna cota se
    mueve en tres iteraciones el bucle se detiene sin convergencia.
    """
    if alpha <= 1:
        raise InvalidOrder(f"K̃_α requiere α > 1, se recibió {alpha}")
    kmap = as_kraus_map(ch)
    budget = budget or DEFAULT_BUDGET
    seed = DEFAULT_SEED if seed is None else seed
    max_iter = max_iter or 10 + budget
    init_seed, loop_seed, cert_seed = linalg.spawn_seeds(seed, 3)
    d = kmap.d_in
    psis = _initial_states(np.random.default_rng(init_seed), d, d * d, include_basis=True)
    probs = np.full(len(psis), 1.0 / len(psis))
    sigma = None
    oracle_seeds = linalg.spawn_seeds(loop_seed, max_iter)

    upper, lower, sigma_best, best_ensemble = np.inf, -np.inf, None, None
    history, iterations = [], 0
    for it in range(max_iter):
        iterations = it + 1
        outputs = _outputs(kmap, psis)
        probs, sigma, value, scores = _alpha_weights(outputs, probs, alpha, sigma)
        if value > lower:
            lower, best_ensemble = value, (psis.copy(), probs.copy())
        sup, worst, _ = maximize_over_pure_states(
            SandwichedObjective(kmap, sigma, alpha), 4, oracle_seeds[it],
            warm_starts=psis[probs > 1e-6], grid=COARSE_GRID,
        )
        sup = max(sup, float(scores.max()))
        if sup < upper:
            upper, sigma_best = sup, sigma
        history.append((upper, lower))
        logger.debug("[radio-α] α=%.6g iteración %d: L=%.10f U=%.10f", alpha, it, lower, upper)
        if upper - lower < ALPHA_RADIUS_TOL:
            break
        if len(history) > ALPHA_STALL_ROUNDS and _stalled(history):
            logger.debug("[radio-α] α=%.6g estancado en la iteración %d", alpha, it)
            break
        psis, probs = _append_state(psis, probs, worst)

    certified, _, _ = maximize_over_pure_states(
        SandwichedObjective(kmap, sigma_best, alpha), budget, cert_seed, grid=COARSE_GRID,
    )
    upper = max(upper, certified)
    gap = max(upper - lower, 0.0)
    ens_psis, ens_probs = best_ensemble
    result = CapacityResult(
        value=float(upper),
        optimizer_witness=sigma_best,
        iterations=iterations,
        gap_estimate=float(gap),
        converged=gap <= ALPHA_RADIUS_TOL,
        lower_bound=float(lower),
        details={"ensemble": _witness_ensemble(ens_psis, ens_probs)},
    )
    return _finish(result, strict, "radio-α")


def alpha_holevo(ch, alpha, budget=None, seed=None, strict=False):
    """χ̃_α(N), igual al radio α (valor) y contrastado con la ruta de ensambles."""
    if alpha <= 1:
        raise InvalidOrder(f"χ̃_α requiere α > 1, se recibió {alpha}")
    kmap = as_kraus_map(ch)
    seed = DEFAULT_SEED if seed is None else seed
    radius_seed, holevo_seed = linalg.spawn_seeds(seed, 2)
    radius = alpha_information_radius(kmap, alpha, budget, radius_seed, strict)
    holevo = holevo_information(kmap, budget, holevo_seed)
    ens = holevo.optimizer_witness
    from_holevo, _ = ensemble_alpha_holevo(ens.probs, kmap.apply_to(np.array(ens.states)), alpha)
    best_route = max(from_holevo, radius.lower_bound)
    consistent = best_route <= radius.value + ROUTE_CONSISTENCY_TOL
    if not consistent:
        logger.warning(
            "[alfa-holevo] la ruta de ensambles (%.8f) supera al radio (%.8f)", best_route, radius.value,
        )
    return CapacityResult(
        value=radius.value,
        optimizer_witness=radius.optimizer_witness,
        iterations=radius.iterations,
        gap_estimate=radius.gap_estimate,
        converged=radius.converged,
        lower_bound=float(best_route),
        details={
            "ensemble_route_from_holevo": float(from_holevo),
            "ensemble_route_alpha": float(radius.lower_bound),
            "ensemble": radius.details["ensemble"],
            "consistent": bool(consistent),
        },
    )


def _alpha_seed(seed, alpha):
    key = int(round(alpha * 1e6))
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + (key,))
    return np.random.SeedSequence([int(seed), key])


def strong_converse_exponent(ch, rate, alpha_grid=None, budget=None, seed=None, refine_evals=8):
    """E(R) = sup_{α>1} (α−1)/α·(R − χ̃_α(N)) muestreado sobre una rejilla de α.

    χ̃_α se toma del lado de la cota superior del radio, de modo que la cota
    2^{−nE} resultante sigue siendo válida. Alrededor del mejor punto interior
    se refina con minimize_scalar acotado entre sus vecinos de la rejilla; si
    el mejor está en el borde superior se extiende duplicando α.
    """
    if rate < 0:
        raise InvalidParameter(f"La tasa debe ser no negativa, se recibió {rate}")
    kmap = as_kraus_map(ch)
    budget = budget or DEFAULT_BUDGET
    seed = DEFAULT_SEED if seed is None else seed
    grid = sorted(set(float(a) for a in (alpha_grid or default_alpha_grid())))
    if any(a <= 1 for a in grid):
        raise InvalidOrder("Todos los α de la rejilla deben ser > 1")
    cache = {}

    def evaluate(alphas):
        pending = [a for a in alphas if a not in cache]
        results = parallel_map(
            lambda a: alpha_information_radius(kmap, a, budget, _alpha_seed(seed, a)), pending,
        )
        for a, res in zip(pending, results):
            cache[a] = res

    def term(a):
        return (a - 1.0) / a * (rate - cache[a].value)

    evaluate(grid)
    best = max(grid, key=term)

    if best == max(grid):
        alpha = best
        while alpha < ALPHA_CAP:
            alpha = min(2.0 * alpha, ALPHA_CAP)
            evaluate([alpha])
            if term(alpha) <= term(best):
                break
            best = alpha
    else:
        idx = grid.index(best)
        lo = grid[idx - 1] if idx > 0 else 1.0 + 0.5 * (best - 1.0)
        hi = grid[idx + 1]

        def negative_term(a):
            a = float(a)
            evaluate([a])
            return -term(a)

        minimize_scalar(
            negative_term, bounds=(lo, hi), method="bounded",
            options={"xatol": 1e-3, "maxiter": refine_evals},
        )
        best = max(cache, key=term)

    alphas = sorted(cache)
    chi = [cache[a].value for a in alphas]
    monotone = all(b >= a - MONOTONE_TOL for a, b in zip(chi, chi[1:]))
    if not monotone:
        logger.warning("[exponente] χ̃_α no es monótona dentro de la tolerancia")
    exponent = max(term(a) for a in alphas)
    logger.info("[exponente] R=%.6f E=%.10f α*=%.6g", rate, exponent, best)
    return ExponentCurve(
        alphas=alphas,
        chi_alpha=chi,
        rate=float(rate),
        exponent=float(exponent),
        gap_estimates=[cache[a].gap_estimate for a in alphas],
        best_alpha=float(max(alphas, key=term)),
        monotone=monotone,
    )


def additivity_check(ch, budget=None, seed=None):
    """Compara 2χ(N) con una cota inferior de χ(N⊗N) (sólo d_in ≤ 2)."""
    kmap = as_kraus_map(ch)
    if kmap.d_in > 2:
        raise InvalidParameter("additivity_check sólo admite canales con d_in ≤ 2")
    budget = budget or DEFAULT_BUDGET
    seed = DEFAULT_SEED if seed is None else seed
    single_seed, tensor_seed = linalg.spawn_seeds(seed, 2)
    single = holevo_information(kmap, budget, single_seed)
    ens = single.optimizer_witness
    product = Ensemble(
        tuple(p * q for p in ens.probs for q in ens.probs),
        tuple(np.kron(a, b) for a in ens.states for b in ens.states),
    )
    tensor = holevo_information(
        tensor_channels(kmap, kmap), max(2, budget // 4), tensor_seed, initial_ensemble=product,
    )
    verdict = is_entanglement_breaking(ch)
    lower_ok = 2.0 * single.value <= tensor.value + 1e-4
    gap_ok = verdict != EbVerdict.EB or tensor.value <= 2.0 * single.value + 5e-3
    if not gap_ok:
        warnings.warn("χ(N⊗N) supera 2χ(N) en un canal EB: revisar la búsqueda", RuntimeWarning)
    return AdditivityReport(
        chi=single.value,
        chi_tensor_lower=tensor.value,
        eb_verdict=verdict.value,
        lower_ok=bool(lower_ok),
        gap_ok=bool(gap_ok),
    )
