from decbisim.cli import main

main()
