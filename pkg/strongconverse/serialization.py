# /strongconverse/serialization.py
# Lectura de canales, estados y protocolos; escritura de reportes JSON y CSV.

import dataclasses
import enum
import json
import logging
import os
from datetime import datetime

import jsonschema
import numpy as np
import pandas as pd
import pytz

from . import __version__, channels, linalg
from .errors import DimensionMismatch, InvalidParameter, IoError, NotCPTP, StrongConverseError
from .states import DensityOperator, Ensemble, Povm, ket, projector

logger = logging.getLogger(__name__)

SCHEMA_PATH = os.path.join(os.path.dirname(__file__), "schemas", "report.schema.json")
CSV_FLOAT_FORMAT = "%.15g"


# ---------------------- Matrices y valores ------------------

def encode_matrix(m):
    """Matriz compleja como lista anidada de pares [re, im]."""
    a = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def decode_matrix(obj):
    """Inversa de encode_matrix; también acepta entradas reales."""
    try:
        rows = [[complex(z[0], z[1]) if isinstance(z, (list, tuple)) else complex(z) for z in row] for row in obj]
        return np.array(rows, dtype=complex)
    except (TypeError, ValueError, IndexError) as e:
        raise InvalidParameter(f"Matriz mal formada: {e}") from e


def _number(x):
    x = float(x)
    if np.isnan(x):
        return "nan"
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def to_jsonable(obj):
    """Convierte resultados del paquete a tipos JSON; los no finitos pasan a cadenas."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _number(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_number(obj.real), _number(obj.imag)]
    if isinstance(obj, np.ndarray):
        if obj.ndim == 2 and np.iscomplexobj(obj):
            return encode_matrix(obj)
        return to_jsonable(obj.tolist())
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, DensityOperator):
        return {"matrix": encode_matrix(obj.matrix), "dims": list(obj.dims)}
    if isinstance(obj, Ensemble):
        return {"probs": to_jsonable(obj.probs), "states": [encode_matrix(s) for s in obj.states]}
    if isinstance(obj, Povm):
        return {"elements": [encode_matrix(e) for e in obj.elements]}
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    return obj


def dumps(obj):
    """JSON determinista: claves ordenadas y sin NaN/Infinity literales."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False, ensure_ascii=False)


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise IoError(f"No se pudo leer {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise IoError(f"JSON inválido en {path}: {e}") from e


# ---------------------- Canales ------------------

def _params(text):
    return [p for p in text.split(",") if p != ""] if text else []


def _replacement(args):
    d = int(args[0]) if args else 2
    return channels.replacement(np.eye(d) / d, d)


def _random(args):
    d_in, d_out, seed = (int(a) for a in (args + ["2", "2", "0"][len(args):])[:3])
    return channels.random_channel(d_in, d_out, seed=seed)


def _random_eb(args):
    d_in, d_out, seed = (int(a) for a in (args + ["2", "2", "0"][len(args):])[:3])
    return channels.random_eb_channel(d_in, d_out, seed=seed)


NAMED_CHANNELS = {
    "identity": lambda a: channels.identity(int(a[0]) if a else 2),
    "depolarizing": lambda a: channels.depolarizing(float(a[0]), int(a[1]) if len(a) > 1 else 2),
    "dephasing": lambda a: channels.dephasing(float(a[0])),
    "complete-dephasing": lambda a: channels.complete_dephasing(int(a[0]) if a else 2),
    "bsc": lambda a: channels.binary_symmetric(float(a[0])),
    "replacement": _replacement,
    "random": _random,
    "random-eb": _random_eb,
}


def parse_channel_spec(text):
    """Canal a partir de "nombre:parámetros" (p. ej. depolarizing:0.25) o de una ruta JSON."""
    if text is None:
        raise InvalidParameter("Falta el canal")
    if os.path.exists(text) or text.endswith(".json"):
        return load_channel(text)
    name, _, rest = text.partition(":")
    builder = NAMED_CHANNELS.get(name.strip().lower())
    if builder is None:
        raise InvalidParameter(f"Canal desconocido: {name}. Opciones: {', '.join(sorted(NAMED_CHANNELS))}")
    try:
        return builder(_params(rest))
    except (IndexError, ValueError) as e:
        if isinstance(e, StrongConverseError):
            raise
        raise InvalidParameter(f"Parámetros inválidos para {name}: {rest!r}") from e


def channel_family(text):
    """Familia uniparamétrica del canal nombrado y su intervalo EB→NotEB, si la hay."""
    if text is None:
        return None
    name, _, rest = text.partition(":")
    if name.strip().lower() == "depolarizing":
        args = _params(rest)
        d = int(args[1]) if len(args) > 1 else 2
        return (lambda lam: channels.depolarizing(lam, d)), 0.0, 1.0
    return None


NAMED_PARAMS = {
    "identity": ("d",),
    "depolarizing": ("lambda", "d"),
    "dephasing": ("q",),
    "complete-dephasing": ("d",),
    "bsc": ("p",),
    "replacement": ("d",),
    "random": ("d_in", "d_out", "seed"),
    "random-eb": ("d_in", "d_out", "seed"),
}


def _named_from_dict(data):
    """{"kind":"named","name":...,"params":{...}} o con params posicionales."""
    name = str(data["name"]).strip().lower().replace("_", "-")
    params = data.get("params") or {}
    if name not in NAMED_CHANNELS and ":" in name:
        return parse_channel_spec(name)
    if isinstance(params, dict):
        keys = NAMED_PARAMS.get(name, ())
        unknown = sorted(set(params) - set(keys))
        if unknown:
            raise InvalidParameter(f"Parámetros desconocidos para {name}: {', '.join(unknown)}")
        args = []
        for key in keys:
            if key not in params:
                break
            args.append(params[key])
    else:
        args = list(params)
    return parse_channel_spec(f"{name}:{','.join(str(a) for a in args)}" if args else name)


def channel_from_dict(data):
    kind = str(data.get("kind", "")).replace("-", "_")
    if kind == "kraus":
        ops = data["ops"] if "ops" in data else data["kraus"]
        ch = channels.KrausChannel(tuple(decode_matrix(k) for k in ops))
        for key, actual in (("d_in", ch.d_in), ("d_out", ch.d_out)):
            if key in data and int(data[key]) != actual:
                raise DimensionMismatch(f"{key}={data[key]} no coincide con los operadores ({actual})")
        return ch
    if kind == "choi":
        c = channels.ChoiMatrix(decode_matrix(data["matrix"]), int(data["d_in"]), int(data["d_out"]))
        return channels.from_choi(c)
    if kind == "measure_prepare":
        povm = Povm(tuple(decode_matrix(e) for e in data["povm"]))
        return channels.MeasurePrepareChannel(povm, tuple(decode_matrix(s) for s in data["states"]))
    if kind == "named":
        return _named_from_dict(data)
    raise InvalidParameter(f"Tipo de canal desconocido: {kind}")


def channel_to_dict(ch):
    if isinstance(ch, channels.MeasurePrepareChannel):
        return {
            "kind": "measure_prepare",
            "povm": [encode_matrix(e) for e in ch.povm.elements],
            "states": [encode_matrix(s) for s in ch.prepared_states],
        }
    return {
        "kind": "kraus",
        "d_in": ch.d_in,
        "d_out": ch.d_out,
        "ops": [encode_matrix(k) for k in ch.stacked],
    }


def load_channel(path):
    data = _read_json(path)
    try:
        return channel_from_dict(data)
    except KeyError as e:
        raise NotCPTP(f"Archivo de canal mal formado, falta el campo {e}: {path}") from e
    except (InvalidParameter, DimensionMismatch, AttributeError) as e:
        raise NotCPTP(f"Archivo de canal mal formado ({path}): {e}") from e


# ---------------------- Estados ------------------

def parse_state_spec(text):
    """Estado a partir de una ruta JSON o de mixed:d, ket:i,d o random:d,seed."""
    if os.path.exists(text) or text.endswith(".json"):
        data = _read_json(text)
        return DensityOperator(decode_matrix(data["matrix"] if isinstance(data, dict) else data))
    name, _, rest = text.partition(":")
    args = _params(rest)
    try:
        if name == "mixed":
            return DensityOperator.maximally_mixed(int(args[0]))
        if name == "ket":
            return DensityOperator(projector(ket(int(args[0]), int(args[1]))))
        if name == "random":
            return DensityOperator(linalg.random_density(int(args[0]), seed=int(args[1]) if len(args) > 1 else 0))
    except (IndexError, ValueError) as e:
        if isinstance(e, StrongConverseError):
            raise
        raise InvalidParameter(f"Estado mal especificado: {text!r}") from e
    raise InvalidParameter(f"Estado desconocido: {text!r}")


# ---------------------- Protocolos ------------------

def protocol_to_dict(p):
    return {
        "channel": channel_to_dict(p.channel),
        "n_rounds": p.n_rounds,
        "messages": p.messages,
        "feedback_dims": list(p.feedback_dims),
        "alice_dims": list(p.alice_dims),
        "bob_dims": list(p.bob_dims),
        "initial_alice": [encode_matrix(s) for s in p.initial_alice],
        "initial_bob": encode_matrix(p.initial_bob),
        "encoders": [channel_to_dict(e) for e in p.encoders],
        "decoders": [channel_to_dict(d) for d in p.decoders],
        "final_povm": None if p.final_povm is None else [encode_matrix(e) for e in p.final_povm.elements],
        "separable_inputs": bool(p.separable_inputs),
    }


def protocol_from_dict(data):
    from .protocol import FeedbackProtocol

    povm = data.get("final_povm")
    return FeedbackProtocol(
        channel=channel_from_dict(data["channel"]),
        n_rounds=int(data["n_rounds"]),
        messages=int(data["messages"]),
        feedback_dims=tuple(data["feedback_dims"]),
        alice_dims=tuple(data["alice_dims"]),
        bob_dims=tuple(data["bob_dims"]),
        initial_alice=tuple(decode_matrix(s) for s in data["initial_alice"]),
        initial_bob=decode_matrix(data["initial_bob"]),
        encoders=tuple(channel_from_dict(e) for e in data["encoders"]),
        decoders=tuple(channel_from_dict(d) for d in data.get("decoders", [])),
        final_povm=None if povm is None else Povm(tuple(decode_matrix(e) for e in povm)),
        separable_inputs=bool(data.get("separable_inputs", False)),
    )


# ---------------------- Reportes ------------------

def load_schema():
    with open(SCHEMA_PATH, encoding="utf-8") as fh:
        return json.load(fh)


def validate_report(report):
    """Valida contra el esquema publicado; lanza jsonschema.ValidationError."""
    jsonschema.validate(instance=json.loads(dumps(report)), schema=load_schema())


def build_report(config, result, passed, failures=()):
    return {
        "tool": "strongconverse",
        "version": __version__,
        "command": config.command,
        "seed": config.seed,
        "config": config.echo(),
        "result": result,
        "passed": bool(passed),
        "failures": list(failures),
    }


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def report_frame(report):
    """Tabla plana (quantity, value) de un reporte, o la tabla propia si trae "table"."""
    data = to_jsonable(report)
    table = data.get("result", {}).get("table") if isinstance(data.get("result"), dict) else None
    if table:
        return pd.DataFrame(table)
    return pd.DataFrame(list(_flatten(data)), columns=["quantity", "value"])


def write_report(report, path, fmt="json"):
    """Escribe el reporte y deja la marca de tiempo en <path>.meta.json."""
    try:
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        if fmt == "csv":
            report_frame(report).to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
        else:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(dumps(report) + "\n")
        meta = {"timestamp": datetime.now(pytz.utc).isoformat(), "report": os.path.basename(path)}
        with open(f"{path}.meta.json", "w", encoding="utf-8") as fh:
            fh.write(json.dumps(meta, sort_keys=True) + "\n")
    except OSError as e:
        raise IoError(f"No se pudo escribir {path}: {e}") from e
    logger.info("[reporte] escrito en %s (%s)", path, fmt)
    return path
