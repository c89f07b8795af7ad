# balab library: presented Boolean algebras, bases and forcing conditions
