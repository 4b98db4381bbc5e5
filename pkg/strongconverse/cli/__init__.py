# /strongconverse/cli/__init__.py
# Inicializa el grupo de comandos de la línea de órdenes.

import click

from .. import setup_logging
from ..errors import IoError, NotCPTP, StrongConverseError
from ..serialization import (
    CSV_FLOAT_FORMAT,
    build_report,
    dumps,
    report_frame,
    to_jsonable,
    validate_report,
    write_report,
)
from ..services import execute

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NOT_CPTP = 4


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--log-level", default=None, help="Nivel de logging (por defecto STRONGCONVERSE_LOG_LEVEL).")
@click.pass_context
def cli(ctx, log_level):
    """Divergencias de Rényi, información de Holevo y converso fuerte con retroalimentación."""
    ctx.ensure_object(dict)
    setup_logging(log_level.upper() if log_level else None)


@cli.result_callback()
@click.pass_context
def _dispatch(ctx, config, log_level):
    if ctx.obj.get("parse_only"):
        return config
    ctx.exit(run(config))


def parse_cli(args):
    """Analiza los argumentos sin ejecutar nada; lanza click.UsageError (código 2)."""
    return cli.main(args=list(args), standalone_mode=False, obj={"parse_only": True})


def run(config):
    """Ejecuta la configuración y emite el reporte; devuelve el código de salida."""
    try:
        result, failures = execute(config)
    except IoError as e:
        click.echo(f"Error de E/S: {e}", err=True)
        return EXIT_IO
    except NotCPTP as e:
        click.echo(f"Canal inválido: {e}", err=True)
        return EXIT_NOT_CPTP
    except StrongConverseError as e:
        result, failures = {"error": type(e).__name__}, [str(e)]

    report = build_report(config, to_jsonable(result), not failures, failures)
    validate_report(report)
    try:
        if config.out:
            write_report(report, config.out, config.format)
        elif config.format == "csv":
            click.echo(report_frame(report).to_csv(index=False, float_format=CSV_FLOAT_FORMAT), nl=False)
        else:
            click.echo(dumps(report))
    except IoError as e:
        click.echo(f"Error de E/S: {e}", err=True)
        return EXIT_IO
    for failure in failures:
        click.echo(f"[fallo] {failure}", err=True)
    return EXIT_OK if not failures else EXIT_FAILED


def create_cli():
    return cli


from . import commands  # noqa: E402,F401
