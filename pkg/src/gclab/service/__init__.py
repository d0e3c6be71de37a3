from .app import app
from .runner import VERBS, execute_payload, execute_validated, validate_request

__all__ = ["app", "VERBS", "execute_payload", "execute_validated",
           "validate_request"]
