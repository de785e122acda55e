from kitaev_mpe.cli import main

main()
