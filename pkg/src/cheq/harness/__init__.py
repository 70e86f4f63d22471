from .config import RunConfig, config_hash, validate_config
from .seeding import seed_streams

__all__ = ["RunConfig", "config_hash", "validate_config", "seed_streams"]
