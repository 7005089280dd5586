// Wire types for the controller service endpoints.
export {};
