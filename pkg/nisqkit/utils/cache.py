import hashlib
import threading
import time
from typing import Any, Dict, Optional

import numpy as np

from nisqkit.circuits.circuit import Circuit
from nisqkit.circuits.qasm import render_circuit
from nisqkit.core.config import settings
from nisqkit.core.errors import IdealSimulationBudgetError
from nisqkit.core.logging import get_logger

logger = get_logger(__name__)


class Cache:
    """In-memory cache of per-circuit results."""

    def __init__(self, expiration: int = 3600, max_entries: int = 4096):
        """
        Initialize the cache.

        Args:
            expiration: Entry lifetime in seconds (default: 1 hour).
            max_entries: Oldest entries are evicted beyond this size.
        """
        self.expiration = expiration
        self.max_entries = max_entries
        self.memory_cache: Dict[str, Dict[str, Any]] = {}
        self._lock = threading.Lock()

    def _generate_key(self, namespace: str, circuit: Circuit) -> str:
        """
        Generate a cache key from a namespace and a circuit.

        Args:
            namespace: Result kind (e.g., 'ideal').
            circuit: Bound circuit.

        Returns:
            str: Cache key.
        """
        return f"{namespace}:{hashlib.md5(render_circuit(circuit).encode()).hexdigest()}"

    def get(self, namespace: str, circuit: Circuit) -> Optional[Any]:
        """
        Get a value from the cache.

        Returns:
            Optional[Any]: Cached value or None if missing or expired.
        """
        key = self._generate_key(namespace, circuit)
        with self._lock:
            entry = self.memory_cache.get(key)
            if entry is None:
                return None
            if time.time() - entry["timestamp"] < self.expiration:
                return entry["data"]
            del self.memory_cache[key]
        return None

    def set(self, namespace: str, circuit: Circuit, data: Any) -> None:
        key = self._generate_key(namespace, circuit)
        with self._lock:
            if len(self.memory_cache) >= self.max_entries:
                oldest = min(self.memory_cache, key=lambda k: self.memory_cache[k]["timestamp"])
                del self.memory_cache[oldest]
            self.memory_cache[key] = {"data": data, "timestamp": time.time()}

    def clear(self, namespace: Optional[str] = None) -> None:
        """
        Clear the cache.

        Args:
            namespace: Optional namespace to clear only its entries.
        """
        with self._lock:
            if namespace:
                for key in [k for k in self.memory_cache if k.startswith(f"{namespace}:")]:
                    del self.memory_cache[key]
            else:
                self.memory_cache.clear()


# Create a global cache instance
cache = Cache()


def ideal_distribution(circuit: Circuit, max_qubits: int | None = None) -> np.ndarray:
    """
    Noiseless output distribution, cached by circuit text.

    Raises:
        IdealSimulationBudgetError: The circuit is wider than max_qubits
            (settings.XEB_MAX_QUBITS by default).
    """
    from nisqkit.simulators.statevector import output_distribution

    limit = settings.XEB_MAX_QUBITS if max_qubits is None else max_qubits
    if circuit.n_qubits > limit:
        raise IdealSimulationBudgetError(circuit.n_qubits, limit)
    probs = cache.get("ideal", circuit)
    if probs is None:
        probs = output_distribution(circuit)
        probs.flags.writeable = False
        cache.set("ideal", circuit, probs)
    else:
        logger.debug(f"Ideal distribution cache hit for {len(circuit)} gates")
    return probs
