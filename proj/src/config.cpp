namespace levy { }
