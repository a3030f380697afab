from setuptools import setup, find_packages

with open('README.rst') as f:
    long_description = ''.join(f.readlines())

setup(
    name='dictcode',
    version='0.1.0',
    description='Codes constrained to predetermined dictionaries',
    long_description=long_description,
    long_description_content_type="text/x-rst",
    author='Lukáš Kotlaba',
    author_email='lukas.kotlaba@gmail.com',
    keywords='coding,dictionary,gilbert-varshamov,erasure,channel',
    license='GNU GPLv3',
    packages=find_packages(exclude=['tests']),
    classifiers=[
        'Intended Audience :: Science/Research',
        'Environment :: Console',
        'License :: OSI Approved :: GNU General Public License v3 (GPLv3)',
        'Operating System :: POSIX :: Linux',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Topic :: Scientific/Engineering :: Mathematics',
        ],
    python_requires='>=3.8',
    install_requires=['click', 'numpy', 'scipy', 'networkx'],
    setup_requires=['pytest-runner'],
    tests_require=['pytest'],
    entry_points={
        'console_scripts': [
            'dictcode = dictcode.cli:cli',
        ],
    },
    zip_safe=False,
)
