import os
from pydantic import Field, BaseModel
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

GIB = 1 << 30


class Settings(BaseModel):
    """Toolkit settings."""

    # Logging
    LOG_LEVEL: str = Field(default=os.getenv("LOG_LEVEL", "WARNING"))

    # Dense simulation
    MEMORY_BUDGET_BYTES: int = Field(default=int(os.getenv("MEMORY_BUDGET_BYTES", str(4 * GIB))))
    SV_PRECISION: str = Field(default=os.getenv("SV_PRECISION", "double"))
    SV_BLOCK_SIZE: int = Field(default=int(os.getenv("SV_BLOCK_SIZE", "64")))
    EXPECTATION_CHUNK: int = Field(default=int(os.getenv("EXPECTATION_CHUNK", "16384")))

    # Schrodinger-Feynman
    SF_PATH_BUDGET: int = Field(default=int(os.getenv("SF_PATH_BUDGET", "65536")))

    # Tensor networks
    MPS_MAX_BOND: int = Field(default=int(os.getenv("MPS_MAX_BOND", "256")))
    MPS_TRUNCATION: float = Field(default=float(os.getenv("MPS_TRUNCATION", "0.0")))
    PEPS_COST_BUDGET: float = Field(default=float(os.getenv("PEPS_COST_BUDGET", "1e9")))

    # Benchmarking
    XEB_MAX_QUBITS: int = Field(default=int(os.getenv("XEB_MAX_QUBITS", "20")))

    # Execution
    THREADS: int = Field(default=int(os.getenv("THREADS", str(os.cpu_count() or 1))))
    MC_SHARD_SIZE: int = Field(default=int(os.getenv("MC_SHARD_SIZE", "10000")))
    SEED: int = Field(default=int(os.getenv("SEED", "1234")))

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        validate_assignment = True

    @property
    def complex_dtype(self):
        """Numpy complex dtype selected by SV_PRECISION."""
        import numpy as np

        return np.complex64 if self.SV_PRECISION.lower() == "single" else np.complex128

    def override(self, **values) -> "Settings":
        """
        Update settings in place from keyword values, ignoring None.

        Args:
            values: Setting names mapped to new values.

        Returns:
            Settings: This settings instance.
        """
        for key, value in values.items():
            if value is None:
                continue
            if key not in type(self).model_fields:
                raise KeyError(f"Unknown setting: {key}")
            setattr(self, key, value)
        return self


# Create settings instance
settings = Settings()
