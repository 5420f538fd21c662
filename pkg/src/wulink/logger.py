import copy
import logging

logger = logging.getLogger("wulink")

debug_logger = logging.getLogger("wulink.debug")

check_logger = logging.getLogger("wulink.check")

error_logger = logging.getLogger("wulink.error")


def log_check(suite: str, name: str, passed: bool, context: dict) -> None:
    details = " ".join(f"{key}={value}" for key, value in sorted(context.items()))
    if passed:
        check_logger.info("PASS %s %s %s", suite, name, details)
    else:
        check_logger.warning("FAIL %s %s %s", suite, name, details)


LOGGING_CONFIG: dict = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "default": {
            "format": "%(asctime)s %(levelname)s %(message)s",
        },
    },
    "handlers": {
        "default": {
            "formatter": "default",
            "class": "logging.StreamHandler",
            "stream": "ext://sys.stderr",
        },
    },
    "loggers": {
        "wulink": {"handlers": ["default"], "level": "INFO"},
        "wulink.debug": {
            "handlers": ["default"],
            "level": "WARNING",
            "propagate": False,
        },
        "wulink.check": {"handlers": ["default"], "level": "INFO", "propagate": False},
        "wulink.error": {"handlers": ["default"], "level": "ERROR", "propagate": False},
    },
}


def _merge_dict(base: dict, config: dict) -> dict:
    base = copy.deepcopy(base)

    for key, value in config.items():
        if key not in base:
            base[key] = value
        else:
            if isinstance(value, dict):
                base[key] = _merge_dict(base[key], value)
            else:
                base[key] = value
    return base


def load_config(config: dict) -> dict:
    return _merge_dict(LOGGING_CONFIG, config)
