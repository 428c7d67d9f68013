"""
Command objects for the qmac-capacity command line
"""

from .base import BaseCommand

from .region_commands import RegionCommand

from .property_commands import PropertySuiteCommand

from .plot_commands import (
    PlotCommand,
    render_region_svg
)

from .eval_commands import EvalCommand

from .files import (
    channel_from_spec,
    load_channel,
    load_region,
    load_state,
    state_from_spec
)

__all__ = [
    'BaseCommand',
    'RegionCommand',
    'PropertySuiteCommand',
    'PlotCommand',
    'render_region_svg',
    'EvalCommand',
    'channel_from_spec',
    'load_channel',
    'load_region',
    'load_state',
    'state_from_spec'
]
