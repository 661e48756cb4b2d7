#ifndef CPZ_CPZ_HPP_
#define CPZ_CPZ_HPP_

#include "cpz/certificate.hpp"
#include "cpz/encoding.hpp"
#include "cpz/io.hpp"
#include "cpz/linalg.hpp"
#include "cpz/oracle.hpp"
#include "cpz/sampling.hpp"
#include "cpz/set.hpp"
#include "cpz/solver.hpp"

#endif  // CPZ_CPZ_HPP_
