#pragma once

#include "stickel/cyclotomic_galois.hpp"
#include "stickel/euler_system.hpp"
#include "stickel/exact_arith.hpp"
#include "stickel/finite_field_k.hpp"
#include "stickel/finite_module.hpp"
#include "stickel/group_ring.hpp"
#include "stickel/module_splitting.hpp"
#include "stickel/partial_zeta.hpp"
#include "stickel/report.hpp"
#include "stickel/splitting_sim.hpp"
#include "stickel/stickelberger.hpp"
#include "stickel/suites.hpp"
