from setuptools import setup

import re


def load_version(filename='mobcache/version.py'):
    """Parse a __version__ number from a source file"""
    with open(filename) as source:
        text = source.read()
        for line in text.splitlines():
            match = re.search(r"^__version__ = ['\"]([^'\"]*)['\"]", line)
            if match:
                return match.group(1)

    msg = "Unable to find version number in {}".format(filename)
    raise RuntimeError(msg)


setup(
    name="mobcache",
    version=load_version(),
    packages=['mobcache'],
    package_data={'mobcache': ['default_config.cfg', 'configs/*.cfg']},
    include_package_data=True,
    zip_safe=False,
    description="Mobility-aware cache placement at base stations and user "
                "terminals.",
    long_description=open('README.rst').read(),
    license="Apache Software License",
    python_requires=">=3.8",
    install_requires=["numpy>=1.17",
                      "scipy>=1.9",
                      "begins>=0.9",
                      "six",
                      "matplotlib>=3.1"],
    platforms=['linux'],
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: Apache Software License',
        'Operating System :: POSIX :: Linux',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: Implementation :: CPython',
        'Topic :: Scientific/Engineering',
        'Topic :: System :: Networking',
    ],
    test_suite="tests",
    entry_points={
        'console_scripts': {
            'mobcache = mobcache.cli:main.start'
        }
    }
)
