from __future__ import annotations
from enum import Enum, auto
from typing import NamedTuple, Optional


class TopologyKind(Enum):
    """Backhaul topology (kind) of the server graph"""

    FULL_MESH = auto()
    RING = auto()
    MESH_CENTER_CLOUD = auto()
    MESH_CENTER_BS = auto()

    def __str__(self) -> str:
        return self.name.lower()

    @staticmethod
    def from_string(s: str) -> "TopologyKind":
        """Convert string to TopologyKind

        Examples
        --------
        >>> TopologyKind.from_string("full_mesh")
        <TopologyKind.FULL_MESH: 1>
        >>> TopologyKind.from_string("FullMesh")
        <TopologyKind.FULL_MESH: 1>
        >>> TopologyKind.from_string("ring")
        <TopologyKind.RING: 2>
        >>> TopologyKind.from_string("Mesh-c-Cloud")
        <TopologyKind.MESH_CENTER_CLOUD: 3>
        >>> TopologyKind.from_string("mesh_center_bs")
        <TopologyKind.MESH_CENTER_BS: 4>
        """
        if isinstance(s, TopologyKind):
            return s
        key = s.lower().replace("-", "").replace("_", "").replace(" ", "")
        aliases = {
            "fullmesh": TopologyKind.FULL_MESH,
            "mesh": TopologyKind.FULL_MESH,
            "ring": TopologyKind.RING,
            "meshcentercloud": TopologyKind.MESH_CENTER_CLOUD,
            "meshccloud": TopologyKind.MESH_CENTER_CLOUD,
            "meshcenterbs": TopologyKind.MESH_CENTER_BS,
            "meshcbs": TopologyKind.MESH_CENTER_BS,
        }
        try:
            return aliases[key]
        except KeyError as e:
            raise KeyError(
                f"TopologyKind {s} not recognized. Available options: {[str(m) for m in TopologyKind]}"
            ) from e


class Algorithm(Enum):
    """Solution algorithm for the joint offloading/placement/allocation problem"""

    GTDA = auto()
    GOJRA = auto()
    HODA = auto()

    def __str__(self) -> str:
        return self.name.lower()

    @staticmethod
    def from_string(s: str) -> "Algorithm":
        """Convert string to Algorithm

        Examples
        --------
        >>> Algorithm.from_string("gtda")
        <Algorithm.GTDA: 1>
        >>> Algorithm.from_string("HODA")
        <Algorithm.HODA: 3>
        """
        if isinstance(s, Algorithm):
            return s
        try:
            return Algorithm[s.upper()]
        except KeyError as e:
            raise KeyError(
                f"Algorithm {s} not recognized. Available options: {[str(m) for m in Algorithm]}"
            ) from e


class RequestKey(NamedTuple):
    """Identifies request `request` of MU `mu` in cell `cell`"""

    cell: int
    mu: int
    request: int

    def __str__(self) -> str:
        return f"{self.cell}/{self.mu}/{self.request}"

    @staticmethod
    def from_string(s: str) -> "RequestKey":
        """Parse 'cell/mu/request'

        Examples
        --------
        >>> RequestKey.from_string("0/3/1")
        RequestKey(cell=0, mu=3, request=1)
        """
        parts = s.split("/")
        if len(parts) != 3:
            raise ValueError(f"Request key must be 'cell/mu/request', got {s!r}")
        return RequestKey(*(int(p) for p in parts))


class InfeasibleError(ValueError):
    """A constraint of the offloading problem cannot be met

    Attributes
    ----------
    violation : float
        magnitude of the worst violated constraint (0 if unknown)
    server : int, optional
        server whose capacity is violated, if any
    """

    def __init__(
        self, message: str, *, violation: float = 0.0, server: Optional[int] = None
    ) -> None:
        super().__init__(message)
        self.violation = violation
        self.server = server
