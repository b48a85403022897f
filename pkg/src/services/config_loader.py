"""
Config file loading: YAML (or JSON) files validated into the data models.
Validation failures become ConfigError naming the file and the offending key.
"""

from pathlib import Path
from typing import Any, List, Type, TypeVar

import yaml
from pydantic import BaseModel, ValidationError

from src.models.arch import ArchSpec, SpatialUnrolling
from src.models.workload import LayerSpec
from src.utils.errors import ConfigError
from src.utils.logger import get_logger

logger = get_logger(__name__)

Model = TypeVar("Model", bound=BaseModel)


def read_yaml(path: str) -> Any:
    try:
        with open(path, "r") as f:
            return yaml.safe_load(f)
    except OSError as e:
        raise ConfigError(str(path), None, f"cannot read file: {e.strerror}") from e
    except yaml.YAMLError as e:
        raise ConfigError(str(path), None, f"invalid YAML: {e}") from e


def _validate(model: Type[Model], data: Any, path: str, prefix: str = "") -> Model:
    try:
        return model.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(part) for part in first["loc"])
        if prefix:
            key = f"{prefix}.{key}" if key else prefix
        raise ConfigError(str(path), key or None, first["msg"]) from e


def parse_layer(data: Any, path: str = "<memory>", prefix: str = "") -> LayerSpec:
    return _validate(LayerSpec, data, path, prefix)


def parse_arch(data: Any, path: str = "<memory>") -> ArchSpec:
    return _validate(ArchSpec, data, path)


def parse_spatial(data: Any, path: str = "<memory>") -> SpatialUnrolling:
    if data is None:
        data = []
    if isinstance(data, list):
        data = {"entries": data}
    return _validate(SpatialUnrolling, data, path)


def load_layer(path: str) -> LayerSpec:
    """Load a single-layer file."""
    layer = parse_layer(read_yaml(path), path)
    logger.debug(f"Loaded layer {layer.name} from {path}")
    return layer


def load_network(path: str) -> List[LayerSpec]:
    """Load a network file: a list of layer objects."""
    data = read_yaml(path)
    if data is None:
        data = []
    if not isinstance(data, list):
        raise ConfigError(str(path), None, "a network file must be a list of layers")
    layers = [parse_layer(item, path, prefix=str(index)) for index, item in enumerate(data)]
    logger.info(f"Loaded {len(layers)} layers from {path}")
    return layers


def load_arch(path: str) -> ArchSpec:
    arch = parse_arch(read_yaml(path), path)
    logger.debug(f"Loaded architecture {arch.name} from {path}")
    return arch


def load_spatial(path: str) -> SpatialUnrolling:
    """Load a spatial file: a list of {dim, factor, axis} entries."""
    return parse_spatial(read_yaml(path), path)


def dump_yaml(data: Any) -> str:
    return yaml.safe_dump(data, sort_keys=False)


def fixture_files(directory: str) -> List[Path]:
    root = Path(directory)
    if not root.is_dir():
        raise ConfigError(str(directory), None, "fixture directory not found")
    return sorted(path for path in root.iterdir() if path.suffix in (".yaml", ".yml", ".json"))
