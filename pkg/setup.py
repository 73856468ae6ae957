import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="ttfs-snn",
    version="1.0",
    description="TTFS-SNN trains time-to-first-spike spiking neural networks "
        "with addition and concatenation skip connections and learnable delays, "
        "and generates the wave equation source localization dataset.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    install_requires=['numpy>1.10', 'matplotlib', 'pydantic>=2'],
    extras_require={'test': ['pytest']},
    packages=setuptools.find_packages(exclude=['tests']),
    entry_points={'console_scripts': ['ttfs-snn=ttfs_snn.cli:main']},
    classifiers=[
        'Development Status :: 4 - Beta',
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
)
