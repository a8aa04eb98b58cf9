from . import pendulums, planets, spring_mass, toy

PROBLEMS = [
    *pendulums.PROBLEMS,
    *spring_mass.PROBLEMS,
    *planets.PROBLEMS,
    *toy.PROBLEMS,
]
