# Divisor theory modules
