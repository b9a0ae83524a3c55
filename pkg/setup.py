try:
    from setuptools import setup
except ImportError:
    from distutils.core import setup

setup(
    name='pymsdem',
    version='0.0.1',
    description='Multi-sphere discrete element simulations of arbitrarily '
                'shaped particles',
    classifiers=[
        'Development Status :: 2 - Pre-Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Physics',
    ],
    packages=['pymsdem'],
    install_requires=['numpy', 'scipy', 'future', 'trimesh>=4',
                      'meshio>=5'],
    tests_require=['pytest'],
    extras_require={
        'hdf5': ['h5py'],
        'plot': ['matplotlib'],
    },
    entry_points={
        'console_scripts': ['pymsdem = pymsdem.cli:main'],
    },
)
