# bngraph package
