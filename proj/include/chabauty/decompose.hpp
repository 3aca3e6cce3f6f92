#pragma once

#include "chabauty/lie.hpp"

namespace chabauty {

struct IwasawaFactors {
  GroupElement k;
  GroupElement a;
  GroupElement n;  ///< upper unipotent, or lower unipotent when opposite
  bool opposite;
};

struct PolarFactors {
  AlgebraElement X;  ///< symmetric
  GroupElement k;    ///< g = exp(X) k
};

struct CartanFactors {
  GroupElement k1;
  GroupElement a;  ///< log a in the closed positive chamber
  GroupElement k2;
};

struct ChamberProjection {
  AlgebraElement H;  ///< diagonal, closed chamber
  GroupElement k;    ///< k X k^-1 = H
};

IwasawaFactors iwasawa(const GroupElement& g, bool opposite, const Tolerances& tol);
PolarFactors polar(const GroupElement& g, const Tolerances& tol);
CartanFactors cartan_kak(const GroupElement& g, const Tolerances& tol);
ChamberProjection project_to_chamber(const AlgebraElement& X, const Tolerances& tol);

}  // namespace chabauty
