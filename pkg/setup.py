from setuptools import setup, find_packages

# The version is updated automatically with bumpversion
# Do not update manually
__version = "1.0.0"

setup(
    name="secure_rdi",
    version=__version,
    packages=find_packages(),
    package_data={"secure_rdi": ["schema/*.json"]},
    install_requires=["numpy", "scipy", "setuptools"],
    extras_require={"tests": ["pytest", "pytest-mock"]},
    entry_points={"console_scripts": ["rdi = secure_rdi.cli:main"]},
    description="Rate-distortion-leakage regions for secure source coding "
                "with side information at the encoder."
)
