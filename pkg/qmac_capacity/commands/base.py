"""
Command objects behind the CLI subcommands
"""

import logging
from typing import Any, Dict

from ..errors import QmacError

logger = logging.getLogger(__name__)

EXIT_SUCCESS = 0
EXIT_PROPERTY_VIOLATION = 4


class BaseCommand:
    """A named unit of work returning a result dictionary with an exit code."""

    name: str = ""
    description: str = ""

    def _run(self, **kwargs) -> Dict[str, Any]:
        raise NotImplementedError

    def run(self, **kwargs) -> Dict[str, Any]:
        """
        Execute the command

        Returns:
            Result dictionary; always carries ``success`` and ``exit_code``,
            plus ``error`` when a toolkit error stopped the command
        """
        logger.info(f"Running command '{self.name}'")
        try:
            result = self._run(**kwargs)
        except QmacError as e:
            logger.error(f"Command '{self.name}' failed: {str(e)}")
            return {
                "success": False,
                "error": str(e),
                "exit_code": e.exit_code,
            }
        result.setdefault("exit_code", EXIT_SUCCESS)
        result.setdefault("success", result["exit_code"] == EXIT_SUCCESS)
        return result
