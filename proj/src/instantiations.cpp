// The library is header-only; this translation unit pins explicit
// instantiations of the public entry points at the shipped precision so a
// plain build (without tests) still type-checks all of them.

#include <steklov/characterization.hpp>
#include <steklov/fem.hpp>
#include <steklov/mesh.hpp>
#include <steklov/reconstruction.hpp>
#include <steklov/serialization.hpp>
#include <steklov/topology.hpp>

namespace steklov {

template BoundaryFunctionT<double> derivative<double>(
    const BoundaryFunctionT<double>&);
template BoundaryFunctionT<double> integrate_J<double>(
    const BoundaryFunctionT<double>&, double);
template BoundaryFunctionT<double> multiply<double>(
    const BoundaryFunctionT<double>&, const BoundaryFunctionT<double>&,
    MultiplyInfo*);
template BoundaryOperatorT<double> make_operator<double>(
    const GridSpecT<double>&, const MatC<double>&, int);
template BoundaryOperatorT<double> build_upsilon<double>(
    const BoundaryOperatorT<double>&);
template BoundaryOperatorT<double> build_upsilon_eta_z<double>(
    const BoundaryOperatorT<double>&, const BoundaryFunctionT<double>&,
    std::complex<double>, double);
template BoundaryOperatorT<double> handle_operator<double>(
    const BoundaryOperatorT<double>&);
template KernelBasisT<double> kernel_basis<double>(
    const BoundaryOperatorT<double>&, const RankPolicy&);
template BoundaryOperatorT<double> dn_disk<double>(const GridSpecT<double>&);
template BoundaryOperatorT<double> to_fourier<double>(const DiscreteDN&,
                                                      const GridSpecT<double>&);
template TopologyResultT<double> topology_of<double>(
    const BoundaryOperatorT<double>&, double, double);
template CharacterizationReportT<double> full_report<double>(
    const BoundaryOperatorT<double>&, const CheckConfigT<double>&);
template WindingFieldT<double> winding_field<double>(
    const BoundaryFunctionT<double>&, const FieldBoxT<double>&, int, int, int,
    const WindingOptions&);
template RegionImageT<double> image_region<double>(const WindingFieldT<double>&);
template InteriorValueT<double> evaluate_interior<double>(
    const BoundaryOperatorT<double>&, const KernelBasisT<double>&,
    const BoundaryFunctionT<double>&, const BoundaryFunctionT<double>&,
    std::complex<double>);
template ReconstructResultT<double> reconstruct<double>(
    const BoundaryOperatorT<double>&, const ReconstructConfigT<double>&);

}  // namespace steklov
