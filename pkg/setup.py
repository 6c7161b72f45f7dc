from __future__ import annotations

from pathlib import Path

from setuptools import find_packages, setup


BASE_DIR = Path(__file__).resolve().parent
TEST_REQUIREMENTS = {"pytest", "hypothesis"}


def read_requirements() -> list[str]:
    req = BASE_DIR / "requirements.txt"
    if not req.exists():
        return []
    lines: list[str] = []
    for line in req.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        # test tooling is not a runtime dependency
        if line.split("==")[0] in TEST_REQUIREMENTS:
            continue
        lines.append(line)
    return lines


setup(
    name="cliquesim",
    version="1.0.0",
    description="Congested Clique simulator with forest decomposition, coloring and MIS algorithms for bounded-arboricity graphs",
    long_description=(BASE_DIR / "README.md").read_text(encoding="utf-8") if (BASE_DIR / "README.md").exists() else "",
    long_description_content_type="text/markdown",
    python_requires=">=3.9",
    # flat module layout at the repository root
    packages=find_packages(exclude=("tests", "tests.*")),
    py_modules=[
        "main",
        "config",
        "errors",
        "utils",
        "sim_engine",
        "graph_model",
        "oracles",
        "decomposition",
        "coloring",
        "mis",
        "settings_manager",
        "database",
    ],
    include_package_data=True,
    install_requires=read_requirements(),
    extras_require={"test": sorted(TEST_REQUIREMENTS)},
    entry_points={
        "console_scripts": [
            "cliquesim=main:main",
        ]
    },
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Topic :: System :: Distributed Computing",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "License :: OSI Approved :: MIT License",
    ],
    keywords="congested clique, distributed algorithms, arboricity, graph coloring, mis, simulation",
)
