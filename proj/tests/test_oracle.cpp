// SPDX-License-Identifier: Apache-2.0
#include "test_support.hpp"

#include <pimc/mc_engine.hpp>
#include <pimc/oracle.hpp>

#include <gtest/gtest.h>

using namespace pimc;
using namespace pimc::testing;

namespace
{

param_imc pimc_text( const std::string& text ) { return std::get< param_imc >( parse_model( text ) ); }

grid_spec wide_grid( long d )
{
    grid_spec g;
    g.denominator = d;
    g.budget = 1e8;
    return g;
}

} // namespace

TEST( EnumInstances, Fig5ContainsFig7Instance )
{
    auto p = load_pimc( "fig5.pimc" );
    valuation half{ { "p", R( "1/2" ) }, { "q", R( "1/2" ) } };
    bool found = false;
    for_each_instance( p, wide_grid( 10 ), [ & ]( const valuation& v, const mc& m ) {
        if ( v != half )
            return true;
        auto at = [ & ]( const char* a, const char* b ) {
            auto* x = m.find( m.index_of( a ), m.index_of( b ) );
            return x ? *x : rational( 0 );
        };
        if ( at( "s0", "s1" ) == R( "0.7" ) && at( "s0", "s2" ) == R( "0.3" ) && at( "s1", "s1" ) == R( "0.5" )
             && at( "s1", "s3" ) == R( "0.5" ) && at( "s2", "s1" ) == R( "0.5" ) && at( "s2", "s2" ) == R( "0.5" )
             && at( "s2", "s4" ) == 0 && at( "s3", "s3" ) == 1 ) {
            found = true;
            return false;
        }
        return true;
    } );
    EXPECT_TRUE( found );
}

TEST( EnumInstances, PointIntervalsGiveOneInstance )
{
    auto m = load_mc( "fig1_m1.mc" );
    auto all = enum_instances( to_param_imc( m ), grid_spec{ 10 } );
    ASSERT_EQ( all.size(), 1u );
    EXPECT_EQ( all[ 0 ].chain, m );
    EXPECT_TRUE( all[ 0 ].values.empty() );
}

TEST( EnumInstances, AlwaysEmptyReachableIntervalGivesNothing )
{
    auto p = pimc_text( "pimc\nstates a b\ninit a\na -> b [1, 1]\nb -> b [0.6, 0.5]\n" );
    EXPECT_TRUE( enum_instances( p, grid_spec{ 4 } ).empty() );
    EXPECT_FALSE( brute_consistency( p, grid_spec{ 4 } ) );
}

TEST( EnumInstances, EveryInstanceIsGenuine )
{
    auto p = load_pimc( "fig5.pimc" );
    std::size_t count = 0;
    for_each_instance( p, grid_spec{ 4 }, [ & ]( const valuation& v, const mc& m ) {
        EXPECT_TRUE( validate_mc( m ).ok() );
        EXPECT_TRUE( satisfies_ofa( m, instantiate( p, v ) ).ok );
        ++count;
        return true;
    } );
    EXPECT_GT( count, 0u );
}

TEST( EnumInstances, BudgetIsEnforced )
{
    auto p = load_pimc( "fig5.pimc" );
    grid_spec g;
    g.denominator = 100;
    try {
        enum_instances( p, g );
        FAIL();
    } catch ( const budget_exceeded& e ) {
        EXPECT_GT( e.bound(), g.budget );
    }
    grid_spec few;
    few.max_states = 3;
    EXPECT_THROW( enum_instances( p, few ), budget_exceeded );
    grid_spec bad;
    bad.denominator = 0;
    EXPECT_THROW( bad.points(), error );
}

TEST( EnumInstances, DivisionByZeroValuationsAreSkipped )
{
    auto p = pimc_text( "pimc\nparams q\nstates a\ninit a\na -> a [q / q, 1]\n" );
    auto all = enum_instances( p, grid_spec{ 2 } );
    EXPECT_EQ( all.size(), 2u ); // q = 1/2 and q = 1
}

TEST( BruteConsistency, Examples )
{
    auto fig5 = brute_consistency( load_pimc( "fig5.pimc" ), wide_grid( 10 ) );
    ASSERT_TRUE( fig5 );
    EXPECT_TRUE( satisfies_ofa( fig5->chain, instantiate( load_pimc( "fig5.pimc" ), fig5->values ) ).ok );
    EXPECT_TRUE( brute_consistency( pimc_text( "pimc\nstates s\ninit s\ns -> s [1, 1]\n" ), grid_spec{ 1 } ) );
}

TEST( BruteConsistency, IrrationalParameterIsMissedByTheGrid )
{
    // Needs p * p = 1/2.
    auto p = pimc_text( "pimc\nparams p\nstates a b c\ninit a\n"
                        "a -> b [p * p, p * p]\na -> c [1/2, 1/2]\nb -> b [1, 1]\nc -> c [1, 1]\n" );
    EXPECT_FALSE( brute_consistency( p, grid_spec{ 10 } ) );
    EXPECT_FALSE( brute_consistency( p, wide_grid( 100 ) ) );
}

TEST( BruteReachBounds, PointIntervals )
{
    auto m = load_mc( "fig1_m1.mc" );
    auto b = brute_reach_bounds( to_param_imc( m ), { "beta" }, grid_spec{ 4 } );
    EXPECT_EQ( b.min, R( "3/10" ) );
    EXPECT_EQ( b.max, R( "3/10" ) );
    EXPECT_EQ( b.instances, 1u );
}

TEST( BruteReachBounds, SingleFreeTransition )
{
    auto p = pimc_text( "pimc\nstates s0 s1:x sink\ninit s0\n"
                        "s0 -> s1 [0.2, 0.7]\ns0 -> sink [0, 1]\ns1 -> s1 [1, 1]\nsink -> sink [1, 1]\n" );
    auto b = brute_reach_bounds( p, { "x" }, grid_spec{ 10 } );
    EXPECT_EQ( b.min, R( "1/5" ) );
    EXPECT_EQ( b.max, R( "7/10" ) );
}

TEST( BruteReachBounds, Fig5BetaIsSelfConsistent )
{
    auto p = load_pimc( "fig5.pimc" );
    auto b = brute_reach_bounds( p, { "beta" }, grid_spec{ 4 } );
    EXPECT_LE( rational( 0 ), b.min );
    EXPECT_LE( b.min, b.max );
    EXPECT_LE( b.max, rational( 1 ) );
    auto goal = states_with_label( p, { "beta" } );
    EXPECT_EQ( reach_prob( b.argmin.chain, b.argmin.chain.initial(), goal ), b.min );
    EXPECT_EQ( reach_prob( b.argmax.chain, b.argmax.chain.initial(), goal ), b.max );
    EXPECT_TRUE( satisfies_ofa( b.argmin.chain, instantiate( p, b.argmin.values ) ).ok );
}

TEST( BruteReachBounds, InconsistentOnGrid )
{
    auto p = pimc_text( "pimc\nstates a b\ninit a\na -> b [1, 1]\nb -> b [0.6, 0.5]\n" );
    try {
        brute_reach_bounds( p, { "x" }, grid_spec{ 4 } );
        FAIL();
    } catch ( const error& e ) {
        EXPECT_NE( std::string( e.what() ).find( "inconsistent on grid" ), std::string::npos );
    }
}

TEST( TruncatedPathSum, Examples )
{
    auto m = load_mc( "fig1_m1.mc" );
    auto one = truncated_path_sum( m, 0, { 1 }, 1 );
    EXPECT_EQ( one.lower, R( "0.7" ) );
    EXPECT_EQ( one.residual, R( "0.3" ) );
    auto zero = truncated_path_sum( m, 0, { 1 }, 0 );
    EXPECT_EQ( zero.lower, rational( 0 ) );
    EXPECT_EQ( zero.residual, rational( 1 ) );
    auto stuck = truncated_path_sum( m, 4, { 1 }, 3 );
    EXPECT_EQ( stuck.lower, rational( 0 ) );
    EXPECT_EQ( stuck.residual, rational( 0 ) );
    auto inside = truncated_path_sum( m, 1, { 1 }, 0 );
    EXPECT_EQ( inside.lower, rational( 1 ) );
}

TEST( TruncatedPathSumProperty, SandwichAndShrinkingResidual )
{
    rng g( 81 );
    for ( int round = 0; round < 80; ++round ) {
        auto m = random_mc( g, 1 + g.below( 6 ) );
        state_set target{ g.below( m.state_count() ) };
        state_index from = g.below( m.state_count() );
        rational exact = reach_prob( m, from, target );
        rational prev_residual( 2 );
        for ( std::size_t depth = 0; depth <= 12; ++depth ) {
            auto s = truncated_path_sum( m, from, target, depth );
            EXPECT_LE( s.lower, exact );
            EXPECT_LE( exact, s.lower + s.residual );
            EXPECT_LE( s.residual, prev_residual );
            prev_residual = s.residual;
        }
        // Absorbing structure: the live mass vanishes in the limit.
        EXPECT_LT( truncated_path_sum( m, from, target, 400 ).residual, R( "1/1000" ) );
    }
}
