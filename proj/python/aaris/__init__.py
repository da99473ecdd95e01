# SPDX-License-Identifier: Apache-2.0
"""RSMA aerial active-RIS downlink simulator with MSAT/MMSAT agents."""

from ._aaris import *  # noqa: F401,F403
