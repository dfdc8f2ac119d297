import json
import logging
import os
import time

logger = logging.getLogger(__name__)


def load_progress(path):
    if os.path.exists(path):
        try:
            with open(path, "r", encoding="utf-8") as f:
                progress = json.load(f)
                logger.debug(f"Loaded progress from {path}: {len(progress.get('cells', {}))} cells")
                return progress
        except (OSError, json.JSONDecodeError) as e:
            logger.error(f"Error loading progress file {path}: {e}")
            return {}
    else:
        logger.debug("Progress file not found; returning empty progress dictionary.")
    return {}


def save_progress(progress, path):
    tmp_path = f"{path}.tmp"
    with open(tmp_path, "w", encoding="utf-8") as f:
        json.dump(progress, f, indent=4, sort_keys=True)
    os.replace(tmp_path, path)
    logger.debug(f"Progress saved to {path}")


def initialize_progress(path, sweep_key):
    """Returns the stored progress when it belongs to the same sweep, else a fresh one."""
    progress = load_progress(path)
    if progress.get("sweep_key") == sweep_key:
        done = len(completed_cells(progress))
        logger.info(f"Resuming sweep from {path}: {done} cells already complete")
        return progress
    if progress:
        logger.warning(f"Progress file {path} belongs to a different sweep; starting over")
    progress = {"sweep_key": sweep_key, "cells": {}, "events": []}
    save_progress(progress, path)
    logger.info(f"Progress initialized at {path}")
    return progress


def update_cell_status(progress, path, index, status, result=None, error=""):
    cell = progress.setdefault("cells", {}).setdefault(str(index), {"attempts": 0})
    cell["status"] = status
    cell["attempts"] = cell.get("attempts", 0) + 1
    cell["last_error"] = error
    if result is not None:
        cell["result"] = result
    save_progress(progress, path)
    logger.debug(f"Cell {index} status updated to '{status}'")


def completed_cells(progress):
    """Cell index -> stored result of every cell that finished successfully."""
    return {
        int(index): cell["result"]
        for index, cell in progress.get("cells", {}).items()
        if cell.get("status") == "done" and "result" in cell
    }


def get_progress_summary(progress):
    cells = progress.get("cells", {})
    statuses = [cell.get("status") for cell in cells.values()]
    return {
        "sweep_key": progress.get("sweep_key", "N/A"),
        "total_cells": len(cells),
        "done": statuses.count("done"),
        "failed": statuses.count("failed"),
    }


def log_event(progress, path, event_type, message, details=None):
    event = {
        "event_type": event_type,
        "message": message,
        "details": details if details else {},
        "timestamp": time.strftime("%Y-%m-%d %H:%M:%S"),
    }
    progress.setdefault("events", []).append(event)
    save_progress(progress, path)
    logger.info(f"Event logged: {event_type} - {message}")
