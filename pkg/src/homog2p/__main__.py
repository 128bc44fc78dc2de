from homog2p.cli import main

main()
