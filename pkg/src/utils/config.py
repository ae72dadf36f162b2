"""Run configuration: one TOML file, validated by pydantic, resolved into domain objects."""

import logging
import os
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from functools import cached_property
from pathlib import Path
from typing import Any

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..bowditch.out_instance import OutInstance, OutSettings
from ..free_group.automorphisms import (
    FreeGroupAut,
    certify_inverse,
    compose_all,
    enumerate_ball,
    identity_aut,
    nielsen_generators,
)
from ..free_group.words import Basis, ConjClass, parse_class
from ..limits.trees import DEFAULT_K_MAX, DEFAULT_TOL, TestSet, TrainTrackPair, default_test_set
from .errors import InputError

logger = logging.getLogger(__name__)

OUTPUT_ENV = "OUTFN_OUTPUT_DIR"
_TOML_POSITION = re.compile(r"line (\d+), column (\d+)")


class MapModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    images: list[str]
    inverse_images: list[str] | None = None
    backward_images: list[str] | None = None
    geometric: bool | None = None
    fixed_class: str | None = None
    tag: str = ""


class SettingsModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    eps: float = Field(0.5, gt=0)
    mu: float = Field(0.05, gt=0)
    eps_eq: float = Field(1e-6, gt=0)
    tol: float = Field(DEFAULT_TOL, gt=0)
    k_max: int = Field(DEFAULT_K_MAX, ge=1)
    radius: int = Field(4, ge=0)
    generators: str | list[str] = "nielsen"
    r: int | None = Field(None, ge=0)
    seed: int = 0
    workers: int = Field(4, ge=1)
    quadruple_budget: int = Field(100_000, ge=1)
    quintuple_budget: int = Field(20_000, ge=1)
    triple_budget: int = Field(1500, ge=1)
    sample_size: int = Field(48, ge=4)
    axis: int = Field(5, ge=0)
    test_extras: list[str] = Field(default_factory=list)
    primitive_extras: int = Field(20, ge=0)
    poles: list[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _margin_inside_eps(self) -> "SettingsModel":
        if self.mu >= self.eps:
            raise ValueError(f"mu ({self.mu}) must be smaller than eps ({self.eps})")
        return self


class T2Model(BaseModel):
    model_config = ConfigDict(extra="forbid")

    f: str
    g: str
    max_length: int = Field(8, ge=1)
    all_classes: bool = False


class OrbitModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    generators: list[str]
    marker: str
    radius: int = Field(3, ge=0)


class TranslationModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    map: str
    n_max: int = Field(8, ge=1)
    r: int | None = Field(None, ge=0)


class WPDModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    map: str
    C: int = Field(2, ge=0)
    N: list[int] = Field(default_factory=lambda: [0, 1, 2, 4, 6])
    radius: int = Field(4, ge=0)


class PairingModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    map: str
    k: int = Field(20, ge=2)
    start: int = Field(5, ge=1)


class ScalingModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    p: str
    q: str
    elements: list[str] = Field(default_factory=list)
    chains: int = Field(10, ge=1)
    chain_length: int = Field(4, ge=1)


class ExperimentsModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    t2: T2Model | None = None
    orbit: OrbitModel | None = None
    translation: TranslationModel | None = None
    wpd: WPDModel | None = None
    pairing: PairingModel | None = None
    scaling: ScalingModel | None = None


class ConfigModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    rank: int = Field(ge=2, le=26)
    maps: dict[str, MapModel] = Field(default_factory=dict)
    settings: SettingsModel = Field(default_factory=SettingsModel)
    experiments: ExperimentsModel = Field(default_factory=ExperimentsModel)

    @model_validator(mode="after")
    def _names_defined(self) -> "ConfigModel":
        for name, spec in self.maps.items():
            for field_name in ("images", "inverse_images", "backward_images"):
                images = getattr(spec, field_name)
                if images is not None and len(images) != self.rank:
                    raise ValueError(f"maps.{name}.{field_name}: expected {self.rank} images")
        for pole in self.settings.poles:
            if pole not in self.maps:
                raise ValueError(f"settings.poles names undefined map {pole!r}")
        e = self.experiments
        referenced = [
            *([e.t2.f, e.t2.g] if e.t2 else []),
            *([e.translation.map] if e.translation else []),
            *([e.wpd.map] if e.wpd else []),
            *([e.pairing.map] if e.pairing else []),
            *([e.scaling.p, e.scaling.q] if e.scaling else []),
        ]
        for name in referenced:
            if name not in self.maps:
                raise ValueError(f"experiment references undefined map {name!r}")
        return self


def _from_validation(error: ValidationError) -> InputError:
    first = error.errors()[0]
    where = ".".join(str(part) for part in first["loc"]) or "config"
    return InputError(f"Invalid config at {where}: {first['msg']}")


def parse_config(text: str) -> ConfigModel:
    """Decode and validate TOML text; every failure surfaces as InputError."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        position = _TOML_POSITION.search(str(e))
        line, column = (int(position[1]), int(position[2])) if position else (None, None)
        raise InputError(f"Config is not valid TOML: {e}", line, column) from e
    try:
        return ConfigModel.model_validate(data)
    except ValidationError as e:
        raise _from_validation(e) from e


class Config:
    """A validated config resolved against its basis: automorphisms, pairs, test sets."""

    def __init__(self, model: ConfigModel, source: str = "<memory>"):
        self.model = model
        self.source = source
        self.basis = Basis(model.rank)
        self.settings = model.settings
        self.experiments = model.experiments
        self._auts: dict[str, FreeGroupAut] = {}
        self._pairs: dict[str, TrainTrackPair] = {}
        for name, spec in model.maps.items():
            try:
                self._auts[name] = FreeGroupAut.from_strings(
                    self.basis, spec.images, spec.inverse_images, name
                )
            except InputError as e:
                raise InputError(f"maps.{name}: {e}") from e

    @classmethod
    def load(cls, path: str | Path) -> "Config":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise InputError(f"Cannot read config {path}: {e}") from e
        config = cls(parse_config(text), str(path))
        logger.info(f"Loaded config {path}: rank {config.basis.rank}, maps {config.map_names}")
        return config

    @property
    def map_names(self) -> list[str]:
        return list(self._auts)

    def aut(self, name: str) -> FreeGroupAut:
        if name in self._auts:
            return self._auts[name]
        for g in self.nielsen:
            if g.name == name:
                return g
        if name == "id":
            return identity_aut(self.basis)
        raise InputError(f"Unknown automorphism {name!r}")

    @cached_property
    def nielsen(self) -> list[FreeGroupAut]:
        return nielsen_generators(self.basis)

    def element(self, expression: str) -> FreeGroupAut:
        """Parse ``name*name^-1*...``; ``id`` is the identity."""
        factors = []
        for token in expression.replace(" ", "").split("*"):
            if not token:
                raise InputError(f"Empty factor in element {expression!r}")
            invert = token.endswith("^-1")
            g = self.aut(token[:-3] if invert else token)
            factors.append(g.inverse() if invert else g)
        return compose_all(self.basis, factors)

    def pair(self, name: str) -> TrainTrackPair:
        if name not in self._pairs:
            spec = self.model.maps.get(name)
            if spec is None:
                raise InputError(f"Unknown map {name!r}")
            f = self.aut(name)
            if f.has_inverse:
                certify_inverse(f)
            backward = None
            if spec.backward_images is not None:
                backward = FreeGroupAut.from_strings(
                    self.basis, spec.backward_images, spec.images, f"{name}^-1"
                )
            fixed = parse_class(self.basis, spec.fixed_class) if spec.fixed_class else None
            self._pairs[name] = TrainTrackPair.from_aut(f, backward, bool(spec.geometric), fixed)
        return self._pairs[name]

    def poles(self) -> list[TrainTrackPair]:
        names = self.settings.poles or [n for n, s in self.model.maps.items() if s.tag == "pole"]
        if not names:
            raise InputError("No poles configured: set settings.poles")
        return [self.pair(n) for n in names]

    def classes(self, texts: list[str]) -> list[ConjClass]:
        return [parse_class(self.basis, t) for t in texts]

    def testset(self, exclude: ConjClass | None = None) -> TestSet:
        return default_test_set(
            self.basis,
            self.classes(self.settings.test_extras),
            exclude,
            self.settings.primitive_extras,
        )

    def testset_file(self, path: str | Path) -> TestSet:
        """One class per line; blank lines and ``#`` comments are skipped."""
        path = Path(path)
        try:
            lines = path.read_text(encoding="utf-8").splitlines()
        except OSError as e:
            raise InputError(f"Cannot read test set {path}: {e}") from e
        texts = [line.split("#", 1)[0].strip() for line in lines]
        return TestSet(tuple(self.classes([t for t in texts if t])))

    def generators(self) -> list[FreeGroupAut]:
        spec = self.settings.generators
        if spec == "nielsen":
            return self.nielsen
        if isinstance(spec, str):
            spec = [spec]
        return [self.element(e) for e in spec]

    def ball(self, radius: int | None = None) -> list[FreeGroupAut]:
        return enumerate_ball(self.generators(), self.settings.radius if radius is None else radius)

    def out_settings(self) -> OutSettings:
        s = self.settings
        return OutSettings(
            s.eps, s.mu, s.eps_eq, s.sample_size, s.tol, s.k_max, s.workers, axis=s.axis
        )

    def instance(self, radius: int | None = None) -> OutInstance:
        return OutInstance(self.poles(), self.testset(), self.ball(radius), self.out_settings())

    def echo(self) -> dict[str, Any]:
        return self.model.model_dump(mode="json")


def output_dir(override: str | None = None) -> Path | None:
    """``--out`` wins over OUTFN_OUTPUT_DIR from the environment or a .env file."""
    if override:
        return Path(override)
    load_dotenv()
    value = os.getenv(OUTPUT_ENV)
    return Path(value) if value else None
