from .simcli import main

main()
