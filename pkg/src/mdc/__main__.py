from mdc.cli import main

main()
