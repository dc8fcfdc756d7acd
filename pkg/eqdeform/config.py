import os
from dataclasses import dataclass, replace
from typing import Optional

from dotenv import load_dotenv

load_dotenv()


@dataclass(frozen=True)
class Config:
    log_level: str = 'WARNING'
    log_file: Optional[str] = None
    group_bound: int = 64
    slice_slack: int = 2
    max_slice_keys: int = 4000
    enumeration_limit: int = 256

    @classmethod
    def from_env(cls) -> 'Config':
        return cls(
            log_level=os.getenv('EQDEFORM_LOG_LEVEL', 'WARNING'),
            log_file=os.getenv('EQDEFORM_LOG_FILE') or None,
            group_bound=int(os.getenv('EQDEFORM_GROUP_BOUND', 64)),
            slice_slack=int(os.getenv('EQDEFORM_SLICE_SLACK', 2)),
            max_slice_keys=int(os.getenv('EQDEFORM_MAX_SLICE_KEYS', 4000)),
            enumeration_limit=int(os.getenv('EQDEFORM_ENUMERATION_LIMIT', 256)),
        )

    def override(self, **changes) -> 'Config':
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


settings = Config.from_env()
