# /strongconverse/cli/commands.py
# Subcomandos: cada uno arma un RunConfig y lo entrega al grupo.

import click

from .. import DEFAULT_BUDGET, DEFAULT_SEED
from ..models import FORMATS, RunConfig
from ..services import SUITE_ORDER
from . import cli


class AlphaParamType(click.ParamType):
    """Orden α > 0; α = 1 queda reservado para la entropía relativa de Umegaki."""
    name = "alpha"

    def convert(self, value, param, ctx):
        if isinstance(value, float):
            alpha = value
        else:
            try:
                alpha = float(value)
            except ValueError:
                self.fail(f"{value!r} no es un número", param, ctx)
        if alpha <= 0:
            self.fail("α debe ser positivo", param, ctx)
        if alpha == 1:
            self.fail("α = 1 está reservado: omita --alpha para la entropía relativa", param, ctx)
        return alpha


class GridParamType(click.ParamType):
    """Lista de α separada por comas, todos > 1."""
    name = "grid"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            grid = tuple(float(a) for a in str(value).split(",") if a.strip())
        except ValueError:
            self.fail(f"Rejilla inválida: {value!r}", param, ctx)
        if not grid or any(a <= 1 for a in grid):
            self.fail("La rejilla debe contener α > 1", param, ctx)
        return grid


ALPHA = AlphaParamType()
GRID = GridParamType()


def common_options(f):
    """--seed, --budget, --out y --format, compartidas por todos los subcomandos."""
    f = click.option("--format", "fmt", type=click.Choice(FORMATS), default="json", show_default=True)(f)
    f = click.option("--out", type=click.Path(dir_okay=False), default=None, help="Archivo de salida (stdout si se omite).")(f)
    f = click.option("--budget", type=click.IntRange(min=1), default=DEFAULT_BUDGET, show_default=True)(f)
    f = click.option("--seed", type=click.IntRange(min=0), default=DEFAULT_SEED, show_default=True)(f)
    return f


def _config(command, fmt, **kwargs):
    return RunConfig(command=command, format=fmt, **kwargs)


@cli.command()
@click.option("--rho", required=True, help="Estado ρ: ruta JSON o mixed:d, ket:i,d, random:d,seed.")
@click.option("--sigma", required=True, help="Estado σ, mismo formato que --rho.")
@click.option("--alpha", type=ALPHA, default=None, help="Orden α; si se omite, entropía relativa.")
@common_options
def divergence(rho, sigma, alpha, seed, budget, out, fmt):
    """D̃_α(ρ‖σ) sándwich, o D(ρ‖σ) sin --alpha."""
    return _config("divergence", fmt, rho=rho, sigma=sigma, alpha=alpha, seed=seed, budget=budget, out=out)


@cli.command()
@click.option("--channel", required=True, help="Canal: ruta JSON o nombre:parámetros.")
@click.option("--alpha", type=ALPHA, default=None, help="Con α > 1 calcula χ̃_α en lugar de χ.")
@common_options
def capacity(channel, alpha, seed, budget, out, fmt):
    """Información de Holevo χ(N) o χ̃_α(N)."""
    if alpha is not None and alpha < 1:
        raise click.BadParameter("capacity requiere α > 1", param_hint="--alpha")
    return _config("capacity", fmt, channel=channel, alpha=alpha, seed=seed, budget=budget, out=out)


@cli.command()
@click.option("--channel", required=True)
@click.option("--rate", type=click.FloatRange(min=0.0), required=True, help="Tasa R en bits por uso.")
@click.option("--grid", type=GRID, default=None, help="α separados por comas (por defecto la rejilla estándar).")
@common_options
def exponent(channel, rate, grid, seed, budget, out, fmt):
    """Exponente de converso fuerte E(R) y su tabla por α."""
    return _config("exponent", fmt, channel=channel, rate=rate, grid=grid, seed=seed, budget=budget, out=out)


@cli.command("eb-check")
@click.option("--channel", required=True)
@common_options
def eb_check(channel, seed, budget, out, fmt):
    """Veredicto de ruptura de entrelazamiento y frontera estimada."""
    return _config("eb-check", fmt, channel=channel, seed=seed, budget=budget, out=out)


@cli.command()
@click.option("--channel", required=True)
@click.option("--rounds", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--messages", type=click.IntRange(min=2), default=2, show_default=True)
@click.option("--grid", type=GRID, default=None)
@common_options
def simulate(channel, rounds, messages, grid, seed, budget, out, fmt):
    """Simula un protocolo aleatorio con retroalimentación y verifica la cota."""
    return _config(
        "simulate", fmt, channel=channel, rounds=rounds, messages=messages, grid=grid,
        seed=seed, budget=budget, out=out,
    )


@cli.command()
@click.option("--suite", type=click.Choice(list(SUITE_ORDER) + ["all"]), default="all", show_default=True)
@click.option("--cases", type=click.IntRange(min=1), default=None, help="Tope de casos por suite.")
@common_options
def verify(suite, cases, seed, budget, out, fmt):
    """Ejecuta suites de verificación numérica."""
    return _config("verify", fmt, suite=suite, cases=cases, seed=seed, budget=budget, out=out)
