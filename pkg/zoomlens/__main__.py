from zoomlens.main import main

main()
