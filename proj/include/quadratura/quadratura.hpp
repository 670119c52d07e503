#pragma once

#include "quadratura/approximant.hpp"
#include "quadratura/changevar.hpp"
#include "quadratura/darboux.hpp"
#include "quadratura/errors.hpp"
#include "quadratura/expr.hpp"
#include "quadratura/gallery.hpp"
#include "quadratura/improper.hpp"
#include "quadratura/integrand.hpp"
#include "quadratura/parser.hpp"
#include "quadratura/partition.hpp"
#include "quadratura/symbolic.hpp"
