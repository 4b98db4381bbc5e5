# /strongconverse/services.py
# Lógica de los comandos: suites de verificación y ejecución de cada comando.

import logging
import math

import numpy as np

from . import linalg
from .capacities import (
    additivity_check,
    alpha_holevo,
    holevo_information,
    information_radius,
    strong_converse_exponent,
)
from .channels import (
    EbVerdict,
    binary_symmetric,
    choi_min_pt_eigenvalue,
    complete_dephasing,
    depolarizing,
    eb_boundary,
    identity,
    is_entanglement_breaking,
    random_channel,
    replacement,
    white_noise,
)
from .decorators import SUITES, suite
from .divergences import (
    conjugated_channel,
    relative_entropy,
    sandwiched_renyi,
    verify_king,
    verify_nagaoka,
)
from .errors import InvalidParameter
from .protocol import (
    codebook_protocol,
    entangling_protocol,
    random_protocol,
    simulate,
    verify_separability,
    verify_strong_converse_bound,
    verify_weak_converse_chain,
)
from .serialization import channel_family, parse_channel_spec, parse_state_spec, to_jsonable
from .states import random_povm

logger = logging.getLogger(__name__)

AXIOM_ALPHAS = (0.5, 0.75, 0.9, 1.0, 1.1, 1.5, 2.0, 3.0, 5.0)
KING_ALPHAS = (1.0, 1.5, 2.0, 4.0)
ROUTE_ALPHAS = (1.5, 2.0, 3.0)
SUITE_ORDER = (
    "divergence-axioms", "nagaoka", "king", "closed-forms", "alpha-routes", "alpha-limits",
    "strong-converse", "separability", "chain", "additivity",
)


def binary_entropy(p):
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1.0 - p) * np.log2(1.0 - p))


def _rngs(seed, n):
    return [np.random.default_rng(s) for s in linalg.spawn_seeds(seed, n)]


def _divergence(rho, sigma, alpha):
    return relative_entropy(rho, sigma) if alpha == 1.0 else sandwiched_renyi(rho, sigma, alpha)


# ---------------------- Suites ------------------

@suite("divergence-axioms", 200)
def divergence_axioms(seed, budget, cases):
    """Monotonía en α, procesamiento de datos y límite α → 1."""
    failures = []
    for k, rng in enumerate(_rngs(seed, cases)):
        d = (2, 3, 4)[k % 3]
        rho = linalg.random_density(d, seed=rng)
        sigma = linalg.random_density(d, seed=rng)
        ch = random_channel(d, d, n_kraus=2, seed=rng)
        values = [_divergence(rho, sigma, a) for a in AXIOM_ALPHAS]
        if any(b < a - 1e-8 for a, b in zip(values, values[1:])):
            failures.append(f"caso {k}: D̃_α no es monótona en α")
        out_rho, out_sigma = ch.apply_to(rho), ch.apply_to(sigma)
        for a, before in zip(AXIOM_ALPHAS, values):
            if _divergence(out_rho, out_sigma, a) > before + 1e-7:
                failures.append(f"caso {k}: procesamiento de datos violado en α={a}")
        for a in (1.0 - 1e-4, 1.0 + 1e-4):
            if abs(sandwiched_renyi(rho, sigma, a) - values[3]) > 1e-3:
                failures.append(f"caso {k}: D̃_{a} lejos de D")
    return {"cases": cases, "failures": failures}


@suite("nagaoka", 1000)
def nagaoka_suite(seed, budget, cases):
    failures = []
    worst = np.inf
    for k, rng in enumerate(_rngs(seed, cases)):
        d = 2 + k % 2
        rank = 1 if k % 5 == 0 else None
        rho = linalg.random_density(d, rank=rank, seed=rng)
        sigma = linalg.random_density(d, seed=rng)
        effect = random_povm(d, 2, seed=rng).elements[0]
        alpha = 1.0 + float(rng.uniform(1e-3, 4.0))
        check = verify_nagaoka(rho, sigma, effect, alpha)
        if np.isfinite(check.margin):
            worst = min(worst, check.margin)
        if not check:
            failures.append(f"caso {k}: α={alpha:.6f} cota {check.lhs:.10f} > D̃ {check.rhs:.10f}")
    return {"cases": cases, "failures": failures, "details": {"min_margin": worst}}


@suite("king", 200)
def king_suite(seed, budget, cases):
    failures = []
    seeds = linalg.spawn_seeds(seed, cases)
    for k, ss in enumerate(seeds):
        rng = np.random.default_rng(ss)
        alpha = KING_ALPHAS[k % len(KING_ALPHAS)]
        kmap = conjugated_channel(linalg.random_hermitian(2, seed=rng), random_channel(2, 2, seed=rng))
        n_terms = int(rng.integers(1, 5))
        terms = [
            (float(rng.uniform(0.1, 1.0)) * linalg.random_density(2, seed=rng), linalg.random_density(2, seed=rng))
            for _ in range(n_terms)
        ]
        check = verify_king(kmap, terms, alpha, budget, seed=ss)
        if not check:
            failures.append(f"caso {k}: α={alpha} ‖·‖ {check.lhs:.10f} > ν·‖P_B‖ {check.rhs:.10f}")
    return {"cases": cases, "failures": failures}


@suite("closed-forms", 7)
def closed_forms(seed, budget, cases):
    failures = []
    details = {}
    for p in (0.05, 0.1, 0.25):
        value = holevo_information(binary_symmetric(p), budget, seed).value
        details[f"bsc:{p}"] = value
        if abs(value - (1.0 - binary_entropy(p))) > 1e-5:
            failures.append(f"χ(BSC {p}) = {value:.8f}, esperado {1.0 - binary_entropy(p):.8f}")
    for lam in (0.2, 0.5, 0.9):
        value = holevo_information(depolarizing(lam), budget, seed).value
        expected = 1.0 - binary_entropy((1.0 + lam) / 2.0)
        details[f"depolarizing:{lam}"] = value
        if abs(value - expected) > 1e-4:
            failures.append(f"χ(depolarizante {lam}) = {value:.8f}, esperado {expected:.8f}")
    boundary = eb_boundary(depolarizing, 0.0, 1.0)
    details["eb_boundary"] = boundary
    if abs(boundary - 1.0 / 3.0) > 1e-9:
        failures.append(f"frontera EB {boundary:.12f} distinta de 1/3")
    return {"cases": 7, "failures": failures, "details": details}


@suite("alpha-routes", 20)
def alpha_routes_suite(seed, budget, cases):
    """χ̃_α = K̃_α: la ruta de ensambles no supera al radio y lo alcanza."""
    failures = []
    for k, ss in enumerate(linalg.spawn_seeds(seed, cases)):
        ch_seed, *alpha_seeds = ss.spawn(1 + len(ROUTE_ALPHAS))
        ch = random_channel(2, 2, seed=ch_seed)
        for alpha, a_seed in zip(ROUTE_ALPHAS, alpha_seeds):
            res = alpha_holevo(ch, alpha, budget, a_seed)
            if not res.details["consistent"]:
                failures.append(f"canal {k}, α={alpha}: ruta de ensambles por encima del radio")
            if res.lower_bound < res.value - 5e-3:
                failures.append(
                    f"canal {k}, α={alpha}: brecha {res.value - res.lower_bound:.2e} entre rutas",
                )
    return {"cases": cases, "failures": failures}


@suite("alpha-limits", 10)
def alpha_limits_suite(seed, budget, cases):
    """Límites α → 1 de χ̃_α y K̃_α, y χ = K."""
    failures = []
    for k, ss in enumerate(linalg.spawn_seeds(seed, cases)):
        ch_seed, s1, s2, s3 = ss.spawn(4)
        ch = random_channel(2, 2, seed=ch_seed)
        chi = holevo_information(ch, budget, s1).value
        radius = information_radius(ch, budget, s2).value
        near = alpha_holevo(ch, 1.001, budget, s3)
        if abs(near.lower_bound - chi) > 5e-3:
            failures.append(f"canal {k}: |χ̃_1.001 − χ| = {abs(near.lower_bound - chi):.2e}")
        if abs(near.value - radius) > 5e-3:
            failures.append(f"canal {k}: |K̃_1.001 − K| = {abs(near.value - radius):.2e}")
        if abs(chi - radius) > 2e-4:
            failures.append(f"canal {k}: |χ − K| = {abs(chi - radius):.2e}")
    return {"cases": cases, "failures": failures}


def _bits_codebook(messages, rounds):
    return [[(m >> i) & 1 for i in range(rounds)] for m in range(messages)]


@suite("strong-converse", 20)
def strong_converse_suite(seed, budget, cases):
    """p_succ ≤ 2^{−n·E(R)}: igualdad para el canal de reemplazo y barrido depolarizante."""
    failures = []
    details = {"replacement": [], "depolarizing_margins": []}
    curves = {}
    omega = replacement(np.eye(2) / 2, 2)
    for n in (1, 2):
        for L in (2, 4):
            p = codebook_protocol(omega, _bits_codebook(L, n))
            if p.rate not in curves:
                curves[p.rate] = strong_converse_exponent(omega, p.rate, budget=budget, seed=seed)
            rep = verify_strong_converse_bound(p, curve=curves[p.rate])
            details["replacement"].append({"n": n, "L": L, "p_succ": rep.p_succ, "bound": rep.bound})
            if abs(rep.p_succ - 1.0 / L) > 1e-6 or abs(rep.bound - 1.0 / L) > 1e-6 or not rep.bound_ok:
                failures.append(f"reemplazo n={n} L={L}: p_succ={rep.p_succ:.10f} cota={rep.bound:.10f}")

    dep = depolarizing(0.25)
    chi = holevo_information(dep, budget, seed).upper_bound
    rounds = 2
    messages = max(2, math.ceil(2.0 ** (rounds * (chi + 0.5))))
    curve = strong_converse_exponent(dep, np.log2(messages) / rounds, budget=budget, seed=seed)
    for k, ss in enumerate(linalg.spawn_seeds(seed, cases)):
        p = random_protocol(dep, rounds, messages, seed=ss)
        rep = verify_strong_converse_bound(p, curve=curve)
        details["depolarizing_margins"].append(rep.margin)
        if not rep.bound_ok:
            failures.append(f"protocolo {k}: p_succ={rep.p_succ:.10f} > cota {rep.bound:.10f}")
    details["messages"] = messages
    return {"cases": cases + 4, "failures": failures, "details": details}


@suite("separability", 20)
def separability_suite(seed, budget, cases):
    failures = []
    dep = depolarizing(0.25)
    for k, ss in enumerate(linalg.spawn_seeds(seed, cases)):
        _, trajectory = simulate(random_protocol(dep, 2, 2, seed=ss))
        bad = [c for c in verify_separability(trajectory) if not c.is_ppt]
        if bad:
            failures.append(f"protocolo {k}: {len(bad)} estados no PPT sobre un canal EB")
    _, control = simulate(entangling_protocol(identity(2)))
    violations = [c for c in verify_separability(control) if not c.is_ppt]
    if not violations:
        failures.append("control entrelazante: no se detectó ninguna violación PPT")
    return {
        "cases": cases + 1,
        "failures": failures,
        "details": {"control_min_eigenvalue": min((c.min_eigenvalue for c in violations), default=0.0)},
    }


@suite("chain", 10)
def chain_suite(seed, budget, cases):
    failures = []
    channels = {"depolarizing": depolarizing(0.25), "complete-dephasing": complete_dephasing(2)}
    chis = {name: holevo_information(ch, budget, seed).upper_bound for name, ch in channels.items()}
    names = sorted(channels)
    for k, ss in enumerate(linalg.spawn_seeds(seed, cases)):
        name = names[k % len(names)]
        rounds = 1 + k % 3
        _, trajectory = simulate(random_protocol(channels[name], rounds, 2, seed=ss))
        report = verify_weak_converse_chain(trajectory, channels[name], chi=chis[name])
        if not report.passed:
            failures.extend(f"{name} n={rounds} #{k}: {f}" for f in report.failures or ["cadena acumulada"])
    return {"cases": cases, "failures": failures, "details": {"chi": chis}}


@suite("additivity", 2)
def additivity_suite(seed, budget, cases):
    failures = []
    details = {}
    for lam in (0.2, 0.3)[:cases]:
        report = additivity_check(depolarizing(lam), budget, seed)
        details[str(lam)] = {"chi": report.chi, "chi_tensor_lower": report.chi_tensor_lower}
        if not report.lower_ok:
            failures.append(f"λ={lam}: 2χ = {2 * report.chi:.8f} > χ(N⊗N) = {report.chi_tensor_lower:.8f}")
        if not report.gap_ok:
            failures.append(f"λ={lam}: brecha de aditividad {report.gap:.2e}")
    return {"cases": min(cases, 2), "failures": failures, "details": details}


def run_suite(name, seed, budget, cases=None):
    """Ejecuta una suite (o todas con "all"); devuelve la lista de resultados."""
    names = SUITE_ORDER if name == "all" else (name,)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise InvalidParameter(f"Suite desconocida: {', '.join(unknown)}")
    return [SUITES[n](seed, budget, cases) for n in names]


# ---------------------- Comandos ------------------

def _capacity_result(res):
    return {
        "value": res.value,
        "lower_bound": res.lower_bound,
        "upper_bound": res.upper_bound,
        "gap_estimate": res.gap_estimate,
        "converged": res.converged,
        "iterations": res.iterations,
    }


def run_divergence(config):
    rho, sigma = parse_state_spec(config.rho), parse_state_spec(config.sigma)
    if config.alpha is None:
        return {"alpha": 1.0, "kind": "umegaki", "value": relative_entropy(rho, sigma)}, []
    return {"alpha": config.alpha, "kind": "sandwiched", "value": sandwiched_renyi(rho, sigma, config.alpha)}, []


def run_capacity(config):
    ch = parse_channel_spec(config.channel)
    if config.alpha is None:
        res = holevo_information(ch, config.budget, config.seed)
        result = _capacity_result(res)
        result["ensemble"] = res.optimizer_witness
        return result, []
    if config.alpha <= 1:
        raise InvalidParameter("capacity con --alpha requiere α > 1")
    res = alpha_holevo(ch, config.alpha, config.budget, config.seed)
    result = _capacity_result(res)
    result["alpha"] = config.alpha
    result["ensemble"] = res.details["ensemble"]
    failures = [] if res.details["consistent"] else ["ruta de ensambles por encima del radio α"]
    return result, failures


def run_exponent(config):
    ch = parse_channel_spec(config.channel)
    curve = strong_converse_exponent(ch, config.rate, config.grid, config.budget, config.seed)
    table = [
        {"alpha": a, "chi_alpha": c, "term": t}
        for a, c, t in zip(curve.alphas, curve.chi_alpha, curve.terms)
    ]
    result = {
        "rate": curve.rate,
        "exponent": curve.exponent,
        "best_alpha": curve.best_alpha,
        "monotone": curve.monotone,
        "gap_estimates": curve.gap_estimates,
        "table": table,
    }
    return result, [] if curve.monotone else ["χ̃_α no es monótona en α"]


def run_eb_check(config):
    ch = parse_channel_spec(config.channel)
    verdict = is_entanglement_breaking(ch)
    result = {"verdict": verdict.value, "min_pt_eigenvalue": choi_min_pt_eigenvalue(ch), "boundary_estimate": None}
    family = channel_family(config.channel)
    if family is not None:
        result["boundary_estimate"] = eb_boundary(*family)
    elif verdict == EbVerdict.NOT_EB:
        result["white_noise_robustness"] = eb_boundary(lambda t: white_noise(ch, t), 0.0, 1.0)
    return result, []


def run_simulate(config):
    ch = parse_channel_spec(config.channel)
    p = random_protocol(ch, config.rounds, config.messages, seed=config.seed)
    report = verify_strong_converse_bound(p, "best", config.grid, config.budget, config.seed)
    _, trajectory = simulate(p)
    chain = verify_weak_converse_chain(trajectory, ch, budget=config.budget, seed=config.seed)
    report.chain_ok = chain.passed
    failures = []
    if not report.bound_ok:
        failures.append(f"p_succ={report.p_succ:.10f} supera la cota {report.bound:.10f}")
    if not report.separability_ok:
        failures.append("estados no PPT en la trayectoria")
    failures.extend(chain.failures)
    if not chain.cumulative_ok:
        failures.append("cadena acumulada I(M;B_nB′_{n−1}) > nχ")
    table = [{"round": 0, "quantity": q, "value": getattr(report, q)} for q in ("p_succ", "bound", "rate", "exponent")]
    for row in chain.rounds:
        table.extend({"round": row["round"], "quantity": q, "value": v} for q, v in row.items() if q != "round")
    result = to_jsonable(report)
    result.update({"margin": report.margin, "chain": to_jsonable(chain), "table": table})
    return result, failures


def run_verify(config):
    results = run_suite(config.suite or "all", config.seed, config.budget, config.cases)
    failures = [f"{r['suite']}: {f}" for r in results for f in r["failures"]]
    return {"suite": config.suite or "all", "suites": results}, failures


COMMAND_RUNNERS = {
    "divergence": run_divergence,
    "capacity": run_capacity,
    "exponent": run_exponent,
    "eb-check": run_eb_check,
    "simulate": run_simulate,
    "verify": run_verify,
}


def execute(config):
    """Ejecuta el comando de config; devuelve (resultado, fallos)."""
    logger.info("[servicio] comando %s con semilla %d", config.command, config.seed)
    return COMMAND_RUNNERS[config.command](config)
