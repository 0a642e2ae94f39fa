#ifndef FERMITRAP_FERMITRAP_HPP
#define FERMITRAP_FERMITRAP_HPP

#include "fermitrap/constants.hpp"
#include "fermitrap/edoracle.hpp"
#include "fermitrap/errors.hpp"
#include "fermitrap/interaction.hpp"
#include "fermitrap/io.hpp"
#include "fermitrap/matrix_elements.hpp"
#include "fermitrap/observables.hpp"
#include "fermitrap/occupations.hpp"
#include "fermitrap/potentials.hpp"
#include "fermitrap/quadrature.hpp"
#include "fermitrap/specfun.hpp"
#include "fermitrap/trap.hpp"

#endif  // FERMITRAP_FERMITRAP_HPP
