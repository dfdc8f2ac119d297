#!/usr/bin/env python3
import logging
import os
import sys

REQUIREMENTS_FILE = "requirements.txt"

logging.basicConfig(level=logging.INFO, format="%(message)s")
logger = logging.getLogger(__name__)

try:
    from setuptools import find_packages, setup
except ImportError:
    sys.exit("setuptools not found. Please install setuptools and try again.")


def read_requirements():
    if not os.path.exists(REQUIREMENTS_FILE):
        logger.warning(f"{REQUIREMENTS_FILE} not found; installing without dependencies")
        return []
    with open(REQUIREMENTS_FILE, "r", encoding="utf-8") as f:
        return [line.strip() for line in f if line.strip() and not line.startswith("#") and line.strip() != "pytest"]


def run_setup():
    setup(
        name="delaysnn",
        version="0.1.0",
        description="Spiking networks with learnable synaptic, axonal and dendritic delays, "
                    "an event-driven inference engine and an analytic buffer-cost model.",
        packages=find_packages(exclude=["tests", "examples*"]),
        py_modules=["main"],
        install_requires=read_requirements(),
        extras_require={"test": ["pytest"]},
        python_requires=">=3.9",
        entry_points={
            "console_scripts": [
                "delaysnn=main:run",
            ],
        },
        classifiers=[
            "Programming Language :: Python :: 3",
            "Operating System :: POSIX :: Linux",
        ],
    )


if __name__ == "__main__":
    run_setup()
