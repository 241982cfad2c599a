a!(2,3) | F[a->b](add)
