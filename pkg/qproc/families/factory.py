"""
Family factory: builds event families from config specs
"""

import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from .base import EventFamily
from .builtin import (
    AvoidsSiteFamily,
    ComplementOfCountableFamily,
    CountableFamily,
    CoverageTableFamily,
    CylinderFamily,
    FirstVisitFamily,
    NeverVisitsSiteFamily,
    PositionFamily,
    SingletonFamily,
    UnionFamily,
    VisitsSiteFamily,
    prefix_cylinder,
)
from ..exceptions import ConfigurationError
from ..models.path import CylinderEvent, NPath

logger = logging.getLogger(__name__)

FamilyBuilder = Callable[[Dict[str, Any]], EventFamily]


class FamilyFactory:
    """Registry of event-family builders for an m-site path space"""

    def __init__(self, m: int, base_dir: Optional[Path] = None):
        self.m = m
        self.base_dir = base_dir or Path.cwd()
        self._builders: Dict[str, FamilyBuilder] = {
            'cylinder': self._build_cylinder,
            'prefix': lambda spec: self.prefix(self._path(spec, 'path')),
            'position': lambda spec: self.position_at(self._int(spec, 'time'), self._site(spec)),
            'first-visit': lambda spec: self.first_visit_at(self._site(spec), self._int(spec, 'time')),
            'avoids-site': lambda spec: self.avoids_site(self._site(spec), self._int(spec, 'time')),
            'visits-site': lambda spec: self.visits_site(self._site(spec)),
            'never-visits-site': lambda spec: self.never_visits_site(self._site(spec)),
            'singleton': lambda spec: self.singleton(self._path(spec, 'path')),
            'countable': lambda spec: self.countable(self._paths(spec)),
            'complement-of-countable': lambda spec: self.complement_of_countable(self._paths(spec)),
            'coverage-table': self._build_table,
            'union': lambda spec: UnionFamily([self.create(s) for s in self._list(spec, 'members')],
                                              name=spec.get('name')),
        }

    # Named builders

    def visits_site(self, site: int) -> EventFamily:
        return VisitsSiteFamily(self.m, self._check_site(site))

    def never_visits_site(self, site: int) -> EventFamily:
        return NeverVisitsSiteFamily(self.m, self._check_site(site))

    def first_visit_at(self, site: int, time: int) -> EventFamily:
        return FirstVisitFamily(self.m, self._check_site(site), self._check_time(time))

    def position_at(self, time: int, site: int) -> EventFamily:
        return PositionFamily(self.m, self._check_time(time), self._check_site(site))

    def avoids_site(self, site: int, time: int) -> EventFamily:
        return AvoidsSiteFamily(self.m, self._check_site(site), self._check_time(time))

    def prefix(self, path: NPath) -> EventFamily:
        return prefix_cylinder(path)

    def singleton(self, path: NPath) -> EventFamily:
        return SingletonFamily(path)

    def countable(self, paths: Sequence[NPath]) -> CountableFamily:
        return CountableFamily(self.m, paths)

    def complement_of_countable(self, paths: Sequence[NPath]) -> EventFamily:
        return ComplementOfCountableFamily(self.countable(paths))

    def cylinder(self, event: CylinderEvent, name: Optional[str] = None) -> EventFamily:
        return CylinderFamily(event, name)

    # Registry

    def create(self, spec: Dict[str, Any]) -> EventFamily:
        """
        Create a family from a config spec

        Args:
            spec: Object with a ``family`` key naming a registered builder
                plus that builder's parameters

        Returns:
            Family instance

        Raises:
            ConfigurationError: If the family is unknown or its parameters are invalid
        """
        if not isinstance(spec, dict) or 'family' not in spec:
            raise ConfigurationError(f"Event spec must be an object with a 'family' key, got {spec!r}")
        family_type = spec['family']
        builder = self._builders.get(family_type)
        if builder is None:
            raise ConfigurationError(
                f"Unknown event family '{family_type}'. Available families: {self.list_families()}"
            )
        try:
            family = builder(spec)
        except (TypeError, ValueError, KeyError) as e:
            raise ConfigurationError(f"Invalid '{family_type}' spec: {e}") from e
        if 'name' in spec and isinstance(spec['name'], str):
            family.name = spec['name']
        logger.debug(f"Created family {family.name}")
        return family

    def register_family(self, family_type: str, builder: FamilyBuilder):
        """
        Register a custom family builder

        Args:
            family_type: Unique identifier used in specs
            builder: Callable taking the spec dict and returning a family
        """
        self._builders[family_type] = builder
        logger.info(f"Registered custom family: {family_type}")

    def list_families(self) -> List[str]:
        return sorted(self._builders)

    # Spec parsing

    def _build_cylinder(self, spec: Dict[str, Any]) -> EventFamily:
        rank = self._int(spec, 'rank')
        if 'paths' in spec:
            paths = self._paths(spec)
            if any(p.rank != rank for p in paths):
                raise ConfigurationError(f"All cylinder paths must have rank {rank}")
            event = CylinderEvent.from_paths(paths) if paths else CylinderEvent.empty(self.m, rank)
        elif 'indices' in spec:
            indices = self._list(spec, 'indices')
            if any(isinstance(i, bool) or not isinstance(i, int) for i in indices):
                raise ConfigurationError("Cylinder indices must be integers")
            event = CylinderEvent.from_indices(self.m, rank, indices)
        else:
            raise ConfigurationError("Cylinder spec needs 'paths' or 'indices'")
        return CylinderFamily(event, spec.get('name'))

    def _build_table(self, spec: Dict[str, Any]) -> EventFamily:
        file_name = spec.get('file')
        if not isinstance(file_name, str):
            raise ConfigurationError("Coverage-table spec needs a 'file' string")
        path = Path(file_name)
        if not path.is_absolute():
            path = self.base_dir / path
        return CoverageTableFamily.from_csv(str(path), self.m)

    def _check_site(self, site: int) -> int:
        if isinstance(site, bool) or not isinstance(site, int) or not 0 <= site < self.m:
            raise ConfigurationError(f"Site {site!r} outside 0..{self.m - 1}")
        return site

    @staticmethod
    def _check_time(time: int) -> int:
        if isinstance(time, bool) or not isinstance(time, int) or time < 0:
            raise ConfigurationError(f"Time must be a nonnegative integer, got {time!r}")
        return time

    @staticmethod
    def _int(spec: Dict[str, Any], key: str) -> int:
        value = spec.get(key)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigurationError(f"'{key}' must be an integer, got {value!r}")
        return value

    def _site(self, spec: Dict[str, Any]) -> int:
        return self._check_site(self._int(spec, 'site'))

    @staticmethod
    def _list(spec: Dict[str, Any], key: str) -> list:
        value = spec.get(key)
        if not isinstance(value, list):
            raise ConfigurationError(f"'{key}' must be a list, got {value!r}")
        return value

    def _path(self, spec: Dict[str, Any], key: str) -> NPath:
        return self._to_path(spec.get(key))

    def _paths(self, spec: Dict[str, Any]) -> List[NPath]:
        return [self._to_path(p) for p in self._list(spec, 'paths')]

    def _to_path(self, value: Any) -> NPath:
        if not isinstance(value, list) or not value:
            raise ConfigurationError(f"A path must be a non-empty list of sites, got {value!r}")
        return NPath(tuple(self._check_site(s) for s in value), self.m)


def builtin_families(m: int, base_dir: Optional[Path] = None) -> FamilyFactory:
    """Catalog of built-in families for an m-site path space"""
    return FamilyFactory(m, base_dir)
