#include "srgeo/sl2.hpp"

namespace srgeo {

template struct AlgebraElement<double>;
template struct Covector<double>;
template class Psl2Element<double>;

template AlgebraElement<double> algebra_bracket(const AlgebraElement<double>&,
                                                const AlgebraElement<double>&);
template Matrix3<double> poisson_tensor(const Covector<double>&);
template double casimir(const Covector<double>&);
template AlgebraElement<double> a_matrix(const Covector<double>&);
template Matrix2<double> exp_traceless_sl2(const AlgebraElement<double>&, double);
template Psl2Element<double> exp_traceless(const AlgebraElement<double>&, double);
template double log_in_subgroup(const Matrix2<double>&, const AlgebraElement<double>&,
                                double);

}  // namespace srgeo
