from pathlib import Path

from pydantic_settings import BaseSettings

# Application version - update this for each release
APP_VERSION = "0.1.0"

# Bundled synthetic calibration snapshot (127 qubits, ibm_sherbrooke-shaped)
FIXTURE_PATH = Path(__file__).parent / "data" / "ibm_sherbrooke_synthetic.json"


class Settings(BaseSettings):
    """Application settings with environment variable support."""

    # Snapshot store ("QuantumDatabase")
    store_path: Path = Path("quantum_database")

    # Logging
    log_level: str = "INFO"
    log_file: Path | None = None

    # Ensemble orchestration (None = one worker per member)
    workers: int | None = None

    # Simulator
    validate_states: bool = False  # Check density-matrix invariants after every gate/channel
    max_register_size: int = 10
    cptp_tolerance: float = 1e-9

    # Torch CPU threads per process; results are bitwise stable for a fixed value
    torch_threads: int = 1

    # CSV exports carry no single-qubit gate times; sx on Eagle devices is ~57 ns
    default_single_qubit_gate_ns: float = 56.888

    fixture_path: Path = FIXTURE_PATH

    class Config:
        env_prefix = "QTWINS_"


settings = Settings()
