__import__("sys").exit(__import__("qbattery.cli", fromlist=["main"]).main())
